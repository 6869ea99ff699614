from .base import BaseModel, FrozenModel
from .enums import UNSCORED, Asset, Label, Prediction, RenderFormat, SelectionScheme
from .claims import (
    ClaimRecord,
    FeatureSchema,
    FoldPlan,
    LabeledPoint,
    NormalizationParams,
)
from .market import Holding, MarketConfig, MarketResult, MarketState, TradeRecord
from .agents import AgentState, Genome
from .evolution import EvolutionConfig, GenerationStats, TrainedModel

__all__ = [
    "BaseModel",
    "FrozenModel",
    "UNSCORED",
    "Asset",
    "Label",
    "Prediction",
    "RenderFormat",
    "SelectionScheme",
    "ClaimRecord",
    "FeatureSchema",
    "FoldPlan",
    "LabeledPoint",
    "NormalizationParams",
    "Holding",
    "MarketConfig",
    "MarketResult",
    "MarketState",
    "TradeRecord",
    "AgentState",
    "Genome",
    "EvolutionConfig",
    "GenerationStats",
    "TrainedModel",
]
