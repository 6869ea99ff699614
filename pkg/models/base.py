from pydantic import BaseModel as PydanticBaseModel, ConfigDict


class BaseModel(PydanticBaseModel):
    """领域模型基类"""

    model_config = ConfigDict(extra="forbid", use_enum_values=False)


class FrozenModel(BaseModel):
    """不可变领域模型（基因组、交易记录等值对象）"""

    model_config = ConfigDict(frozen=True)
