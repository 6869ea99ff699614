from enum import Enum

# 未评分（弃权）在 JSON 中的字面值
UNSCORED = "UNSCORED"


class Asset(str, Enum):
    """资产类别：will replicate / will not replicate"""

    YES = "Yes"
    NO = "No"

    @property
    def opposite(self) -> "Asset":
        return Asset.NO if self is Asset.YES else Asset.YES


class Label(str, Enum):
    """复现结果标签"""

    REPLICABLE = "Replicable"
    NOT_REPLICABLE = "NotReplicable"

    @property
    def outcome(self) -> int:
        """数值结果 y ∈ {0, 1}"""
        return 1 if self is Label.REPLICABLE else 0

    @property
    def winning_asset(self) -> Asset:
        """结算时每股兑付 1 的资产"""
        return Asset.YES if self is Label.REPLICABLE else Asset.NO

    @classmethod
    def from_token(cls, token: str) -> "Label":
        return cls(token)


class Prediction(str, Enum):
    """评分预测"""

    REPLICABLE = "Replicable"
    NOT_REPLICABLE = "NotReplicable"
    ABSTAIN = "Abstain"

    @classmethod
    def from_label(cls, label: Label) -> "Prediction":
        return cls(label.value)


class RenderFormat(str, Enum):
    """解释报告输出格式"""

    JSON = "json"
    MARKDOWN = "markdown"


class SelectionScheme(str, Enum):
    """父代选择方式"""

    PROPORTIONAL = "proportional"  # 按利润比例
    TOURNAMENT = "tournament"  # 锦标赛
