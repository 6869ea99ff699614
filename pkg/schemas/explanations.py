from typing import List, Optional

from pydantic import Field

from models.base import BaseModel, FrozenModel
from models.enums import Asset, Prediction
from models.market import TradeRecord
from .base import Score


class FeatureContribution(FrozenModel):
    """单个特征对平方距离的贡献 (x_i − c_i)²"""

    feature: str
    contribution: float


class AgentAttribution(BaseModel):
    """参与 agent 的特征归因"""

    agent_id: str
    squared_distance: float = Field(..., description="‖x − c‖²")
    top_features: List[FeatureContribution] = Field(default_factory=list)
    residual: float = Field(0.0, description="未列入 top 的特征贡献之和")


class ParticipationRow(BaseModel):
    """参与交易的 agent 汇总"""

    agent_id: str
    asset_class: Asset
    shares: float
    spend: float
    membership: float = Field(..., description="g(x)")
    belief: float = Field(..., description="σ(k·g(x))")
    own_price_at_open: float
    own_price_at_close: float
    edge_at_open: float = Field(..., description="belief − 开盘自身资产价格")
    edge_at_close: float = Field(..., description="belief − 收盘自身资产价格")
    trades: int


class AbstentionRow(BaseModel):
    """未参与 agent：论文落在其区域外多远"""

    agent_id: str
    asset_class: Asset
    membership: float
    deficit: float = Field(..., description="−g(x)")
    distance: float = Field(..., description="‖x − c‖")
    radius: float


class ExplanationReport(BaseModel):
    """单个 claim 的解释报告"""

    claim_id: str
    score: Score = None
    prediction: Prediction
    population_size: int
    participation_fraction: float = Field(..., description="参与 agent 占种群比例")
    participation: List[ParticipationRow] = Field(default_factory=list)
    attributions: List[AgentAttribution] = Field(default_factory=list)
    abstentions: List[AbstentionRow] = Field(default_factory=list)
    nearest_agent: Optional[str] = Field(None, description="未评分时最接近参与的 agent")
    revenue: float = 0.0
    ledger: List[TradeRecord] = Field(default_factory=list)
    narrative: str = ""
