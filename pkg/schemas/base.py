from typing import Annotated, Any, Optional, Union

from pydantic import BeforeValidator, PlainSerializer

from models.enums import UNSCORED


def _parse_score(value: Any) -> Any:
    """'UNSCORED' 解析为 None"""
    if isinstance(value, str) and value == UNSCORED:
        return None
    return value


def _dump_score(value: Optional[float]) -> Union[float, str]:
    return UNSCORED if value is None else value


# 置信分数：None 表示未评分，JSON 中写作 "UNSCORED"
Score = Annotated[
    Optional[float],
    BeforeValidator(_parse_score),
    PlainSerializer(_dump_score, return_type=Union[float, str]),
]
