from typing import List, Optional

from pydantic import Field, model_validator

from models.base import BaseModel
from models.enums import Label, Prediction
from models.market import TradeRecord
from .base import Score


class ClaimScore(BaseModel):
    """单个 claim 的评分"""

    claim_id: str = Field(..., description="claim id")
    score: Score = Field(None, description="收盘 Yes 价格；未评分为 UNSCORED")
    prediction: Prediction = Field(..., description="预测结果")
    close_price: float = Field(..., description="市场收盘价（未交易时为初始价格）")
    participants: int = Field(0, ge=0, description="参与交易的 agent 数")
    label: Optional[Label] = Field(None, description="真实标签（若有）")
    correct: Optional[bool] = Field(None, description="预测是否正确（有标签且已评分时）")
    ledger_ref: Optional[str] = Field(None, description="交易记录文件路径")
    ledger: List[TradeRecord] = Field(default_factory=list, description="交易记录")

    @model_validator(mode="after")
    def validate_abstain(self):
        if (self.prediction is Prediction.ABSTAIN) != (self.score is None):
            raise ValueError("prediction is Abstain exactly when the score is UNSCORED")
        return self
