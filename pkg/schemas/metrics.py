from typing import Dict, List, Optional

from pydantic import Field

from models.base import BaseModel, FrozenModel
from models.evolution import GenerationStats
from .scores import ClaimScore


class Confusion(FrozenModel):
    """已评分 claim 的混淆矩阵（正类为 Replicable）"""

    tp: int = Field(0, ge=0)
    fn: int = Field(0, ge=0)
    fp: int = Field(0, ge=0)
    tn: int = Field(0, ge=0)

    def __add__(self, other: "Confusion") -> "Confusion":
        return Confusion(
            tp=self.tp + other.tp,
            fn=self.fn + other.fn,
            fp=self.fp + other.fp,
            tn=self.tn + other.tn,
        )

    @property
    def total(self) -> int:
        return self.tp + self.fn + self.fp + self.tn


class ClassMetrics(FrozenModel):
    """单个类别的 precision/recall/F1"""

    precision: float
    recall: float
    f1: float
    support: int


class MetricsReport(BaseModel):
    """评估报告：覆盖率 + 已评分子集上的分类指标"""

    n_total: int = Field(..., ge=0)
    n_scored: int = Field(..., ge=0)
    coverage: float = Field(..., ge=0, le=1)
    accuracy: Optional[float] = Field(None, description="n_scored = 0 时未定义")
    macro_precision: Optional[float] = None
    macro_recall: Optional[float] = None
    macro_f1: Optional[float] = None
    rmse: Optional[float] = Field(None, description="全体有标签 claim 上的 RMSE")
    confusion: Confusion = Field(default_factory=Confusion)
    per_class: Dict[str, ClassMetrics] = Field(default_factory=dict)
    undefined: bool = Field(False, description="没有已评分 claim，分类指标未定义")


class FoldReport(BaseModel):
    """单折报告"""

    fold: int = Field(..., ge=0)
    n_train: int
    n_test: int
    best_generation: int
    best_rmse: float
    metrics: MetricsReport


class CrossValidationResult(BaseModel):
    """交叉验证结果"""

    folds: List[FoldReport]
    pooled: MetricsReport
    scores: List[ClaimScore]
    histories: Dict[int, List[GenerationStats]] = Field(default_factory=dict)


class SweepPoint(BaseModel):
    """参与度曲线上的一个点"""

    fraction: float = Field(..., gt=0, le=1, description="使用的训练数据比例")
    n_train: int = Field(..., description="各折训练集规模之和")
    coverage: float
    accuracy: Optional[float] = None
    macro_f1: Optional[float] = None
    rmse: Optional[float] = None
