from typing import Dict, List, Optional

from pydantic import Field

from .agents import Genome
from .base import BaseModel, FrozenModel
from .claims import NormalizationParams
from .enums import SelectionScheme
from .market import MarketConfig


class EvolutionConfig(FrozenModel):
    """进化训练参数"""

    generations: int = Field(50, ge=0, description="训练代数")
    population_size: int = Field(5, ge=1, description="种群规模")
    initial_cash: float = Field(5.0, gt=0, description="每个市场的初始资金")
    liquidity_b: float = Field(1.0, gt=0, description="LMSR 流动性参数")
    initial_price: float = Field(0.5, gt=0, lt=1, description="Yes 初始价格")
    mutation_sigma_center: float = Field(0.05, ge=0, description="球心变异标准差")
    mutation_log_sigma: float = Field(0.1, ge=0, description="半径/增益对数变异标准差")
    asset_flip_probability: float = Field(0.02, ge=0, le=1, description="资产翻转概率")
    master_seed: int = Field(0, ge=0, description="主随机种子")

    max_rounds: int = Field(100, ge=1)
    trade_size: float = Field(1.0, gt=0)
    min_trade: float = Field(0.01, gt=0)
    margin: float = Field(0.0, ge=0)
    agents_per_market: Optional[int] = Field(None, ge=1)
    initial_steepness: float = Field(50.0, ge=0.1, le=1000.0)
    anchor_jitter: float = Field(0.02, ge=0)
    selection: SelectionScheme = SelectionScheme.PROPORTIONAL
    tournament_size: int = Field(2, ge=1)
    jobs: int = Field(1, description="并行市场数，-1 表示全部 CPU")

    def market_config(self) -> MarketConfig:
        """单个市场的参数"""
        return MarketConfig(
            liquidity_b=self.liquidity_b,
            initial_price=self.initial_price,
            initial_cash=self.initial_cash,
            max_rounds=self.max_rounds,
            trade_size=self.trade_size,
            min_trade=self.min_trade,
            margin=self.margin,
            agents_per_market=self.agents_per_market,
        )


class GenerationStats(BaseModel):
    """一代的评估统计"""

    generation: int = Field(..., ge=0)
    profits: Dict[str, float] = Field(..., description="agent id -> 本代总利润")
    rmse: float = Field(..., ge=0, description="训练集 RMSE")
    coverage: float = Field(..., ge=0, le=1, description="被评分的训练 claim 比例")
    survivor_count: int = Field(..., ge=0, description="利润为正的 agent 数")
    best_rmse: Optional[float] = Field(None, description="截至本代的最小 RMSE")
    trades: int = Field(0, ge=0, description="本代成交笔数")


class TrainedModel(BaseModel):
    """训练好的市场：最佳 RMSE 代的种群快照"""

    genomes: List[Genome]
    normalizer: NormalizationParams
    config: EvolutionConfig
    best_generation: int = Field(..., ge=0)
    best_rmse: float = Field(..., ge=0)
    feature_names: List[str] = Field(default_factory=list)
