from typing import Dict, List, Optional, Tuple

from pydantic import Field, field_validator, model_validator

from .base import BaseModel, FrozenModel
from .enums import Label


class FeatureSchema(FrozenModel):
    """特征空间定义"""

    names: List[str] = Field(..., min_length=1, description="有序特征名")
    dimension: int = Field(..., gt=0, description="特征维度 d")

    @model_validator(mode="after")
    def validate_names(self):
        if any(not name or not name.strip() for name in self.names):
            raise ValueError("feature names must be non-empty")
        if len(set(self.names)) != len(self.names):
            raise ValueError("feature names must be unique")
        if self.dimension != len(self.names):
            raise ValueError(
                f"dimension {self.dimension} does not match {len(self.names)} names"
            )
        return self

    @classmethod
    def default(cls, dimension: int = 41) -> "FeatureSchema":
        """通用特征名 feature_1..feature_d"""
        return cls(
            names=[f"feature_{i}" for i in range(1, dimension + 1)],
            dimension=dimension,
        )


class ClaimRecord(FrozenModel):
    """一篇论文（主要结论）的原始特征与标签"""

    id: str = Field(..., min_length=1, description="论文/结论标识")
    raw_features: List[Optional[float]] = Field(
        ..., description="原始特征，缺失值为 None"
    )
    label: Optional[Label] = Field(None, description="复现标签")


class NormalizationParams(FrozenModel):
    """min-max 归一化参数（仅由训练集拟合）"""

    feature_names: List[str]
    mins: List[float]
    maxs: List[float]
    medians: List[float]

    @model_validator(mode="after")
    def validate_bounds(self):
        n = len(self.feature_names)
        if not (len(self.mins) == len(self.maxs) == len(self.medians) == n):
            raise ValueError("normalization vectors must match feature count")
        for name, lo, med, hi in zip(
            self.feature_names, self.mins, self.medians, self.maxs
        ):
            if not lo <= med <= hi:
                raise ValueError(f"feature '{name}': expected min <= median <= max")
        return self

    @property
    def dimension(self) -> int:
        return len(self.feature_names)


class LabeledPoint(FrozenModel):
    """归一化后的特征点"""

    claim_id: str
    point: Tuple[float, ...]
    label: Optional[Label] = None


class FoldPlan(BaseModel):
    """交叉验证分折方案"""

    fold_count: int = Field(5, ge=2, description="折数")
    assignments: Dict[str, int] = Field(..., description="claim id -> 折序号")
    seed: int = Field(..., ge=0, description="分折随机种子")

    @field_validator("assignments")
    @classmethod
    def validate_assignments(cls, value: Dict[str, int]):
        if any(index < 0 for index in value.values()):
            raise ValueError("fold indices must be non-negative")
        return value

    @model_validator(mode="after")
    def validate_range(self):
        if any(index >= self.fold_count for index in self.assignments.values()):
            raise ValueError("fold index out of range")
        return self

    def test_ids(self, fold: int) -> List[str]:
        return sorted(cid for cid, f in self.assignments.items() if f == fold)

    def train_ids(self, fold: int) -> List[str]:
        return sorted(cid for cid, f in self.assignments.items() if f != fold)

    def fold_sizes(self) -> List[int]:
        sizes = [0] * self.fold_count
        for index in self.assignments.values():
            sizes[index] += 1
        return sizes
