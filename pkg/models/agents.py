import math
from typing import Tuple

from pydantic import Field, field_validator

from .base import BaseModel, FrozenModel
from .enums import Asset

# 基因取值范围
RADIUS_MIN = 0.01
STEEPNESS_MIN = 0.1
STEEPNESS_MAX = 1000.0


def radius_max(dimension: int) -> float:
    """半径上限 √d（单位超立方体对角线）"""
    return math.sqrt(dimension)


class Genome(FrozenModel):
    """agent 可遗传参数"""

    id: str = Field(..., description="agent id")
    asset_class: Asset = Field(..., description="专注购买的资产类别")
    center: Tuple[float, ...] = Field(..., min_length=1, description="球心 c ∈ [0,1]^d")
    radius: float = Field(..., description="半径 r")
    steepness: float = Field(..., description="sigmoid 增益 k")

    @field_validator("center")
    @classmethod
    def validate_center(cls, value):
        if any(not 0.0 <= c <= 1.0 for c in value):
            raise ValueError("center must lie in the unit hypercube")
        return value

    @field_validator("steepness")
    @classmethod
    def validate_steepness(cls, value):
        if not STEEPNESS_MIN <= value <= STEEPNESS_MAX:
            raise ValueError(
                f"steepness {value} outside [{STEEPNESS_MIN}, {STEEPNESS_MAX}]"
            )
        return value

    @field_validator("radius")
    @classmethod
    def validate_radius(cls, value, info):
        center = info.data.get("center")
        upper = radius_max(len(center)) if center else math.inf
        if not RADIUS_MIN <= value <= upper:
            raise ValueError(f"radius {value} outside [{RADIUS_MIN}, {upper}]")
        return value

    @property
    def dimension(self) -> int:
        return len(self.center)


class AgentState(BaseModel):
    """单个市场内的 agent 状态"""

    id: str
    genome: Genome
    cash: float = Field(..., ge=0)
    shares_held: float = Field(0.0, ge=0)
    spend: float = Field(0.0, ge=0)

    @classmethod
    def fresh(cls, genome: Genome, initial_cash: float) -> "AgentState":
        """每个市场重置资金与持仓"""
        return cls(id=genome.id, genome=genome, cash=initial_cash)
