from .base import Score
from .scores import ClaimScore
from .metrics import (
    ClassMetrics,
    Confusion,
    CrossValidationResult,
    FoldReport,
    MetricsReport,
    SweepPoint,
)
from .explanations import (
    AbstentionRow,
    AgentAttribution,
    ExplanationReport,
    FeatureContribution,
    ParticipationRow,
)

__all__ = [
    "Score",
    "ClaimScore",
    "ClassMetrics",
    "Confusion",
    "CrossValidationResult",
    "FoldReport",
    "MetricsReport",
    "SweepPoint",
    "AbstentionRow",
    "AgentAttribution",
    "ExplanationReport",
    "FeatureContribution",
    "ParticipationRow",
]
