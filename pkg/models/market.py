from typing import Dict, List, Optional

from pydantic import Field, model_validator

from .base import BaseModel, FrozenModel
from .enums import Asset


class MarketConfig(FrozenModel):
    """单个市场的运行参数"""

    liquidity_b: float = Field(1.0, gt=0, description="LMSR 流动性参数 b")
    initial_price: float = Field(0.5, gt=0, lt=1, description="will replicate 初始价格")
    initial_cash: float = Field(5.0, gt=0, description="每个 agent 每个市场的初始资金")
    max_rounds: int = Field(100, ge=1, description="最大交易轮数")
    trade_size: float = Field(1.0, gt=0, description="每次决策买入的股数")
    min_trade: float = Field(0.01, gt=0, description="资金不足时的最小可买股数")
    margin: float = Field(0.0, ge=0, description="belief 超过价格的最小幅度")
    agents_per_market: Optional[int] = Field(
        None, ge=1, description="每个市场抽样的 agent 数，None 表示全体参与"
    )


class MarketState(BaseModel):
    """LMSR 做市商状态"""

    q_yes: float = Field(0.0, description="will replicate 流通股数")
    q_no: float = Field(0.0, description="will not replicate 流通股数")
    liquidity_b: float = Field(1.0, gt=0)
    revenue: float = Field(0.0, description="累计收取的成本")
    q0_yes: float = Field(0.0, description="开盘时的 q_yes")
    q0_no: float = Field(0.0, description="开盘时的 q_no")


class TradeRecord(FrozenModel):
    """一笔成交"""

    agent_id: str
    round: int = Field(..., ge=0)
    asset: Asset
    shares: float = Field(..., gt=0)
    cost: float = Field(..., gt=0)
    price_before: float = Field(..., gt=0, lt=1, description="成交前 Yes 价格")
    price_after: float = Field(..., gt=0, lt=1, description="成交后 Yes 价格")

    @model_validator(mode="after")
    def validate_direction(self):
        if self.asset is Asset.YES and not self.price_after > self.price_before:
            raise ValueError("a Yes purchase must raise the Yes price")
        if self.asset is Asset.NO and not self.price_after < self.price_before:
            raise ValueError("a No purchase must lower the Yes price")
        return self


class Holding(FrozenModel):
    """agent 在单个市场中的持仓汇总"""

    asset: Asset
    shares: float
    spend: float


class MarketResult(BaseModel):
    """市场收盘结果"""

    claim_id: Optional[str] = None
    open_price_yes: float
    close_price_yes: float
    ledger: List[TradeRecord] = Field(default_factory=list)
    scored: bool
    rounds_run: int = Field(..., ge=0)
    revenue: float = 0.0
    holdings: Dict[str, Holding] = Field(default_factory=dict)
    participants: List[str] = Field(
        default_factory=list, description="参与本市场的 agent id"
    )

    @model_validator(mode="after")
    def validate_abstention(self):
        if self.scored != bool(self.ledger):
            raise ValueError("scored must be true exactly when the ledger is non-empty")
        if not self.ledger and self.close_price_yes != self.open_price_yes:
            raise ValueError("an untraded market must close at its opening price")
        return self
