import json
from datetime import datetime
from enum import Enum
from pathlib import Path
from typing import Any, Iterable, List, Type, TypeVar

from pydantic import BaseModel

from exceptions import DataFormatException, NotFoundException, SystemException

ModelType = TypeVar("ModelType", bound=BaseModel)


def _serialize_data(data: Any) -> Any:
    """序列化数据"""
    if isinstance(data, datetime):
        return data.isoformat()
    elif isinstance(data, BaseModel):
        return data.model_dump(mode="json")
    elif isinstance(data, Enum):
        return data.value
    elif isinstance(data, (list, tuple)):
        return [_serialize_data(item) for item in data]
    elif isinstance(data, dict):
        return {str(key): _serialize_data(value) for key, value in data.items()}
    else:
        return data


def dumps(data: Any) -> str:
    """确定性 JSON 文本（键排序，缩进 2）"""
    return json.dumps(_serialize_data(data), indent=2, sort_keys=True, ensure_ascii=False)


def _write_text(path: Path, text: str) -> Path:
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text, encoding="utf-8")
    except OSError as e:
        raise SystemException(f"cannot write {path}", original_error=e)
    return path


def write_json(path: Path, data: Any) -> Path:
    """写 JSON 文件"""
    return _write_text(path, dumps(data) + "\n")


def write_jsonl(path: Path, rows: Iterable[Any]) -> Path:
    """写 JSON lines，每行一个对象"""
    lines = [
        json.dumps(_serialize_data(row), sort_keys=True, ensure_ascii=False)
        for row in rows
    ]
    return _write_text(path, "".join(line + "\n" for line in lines))


def read_json(path: Path) -> Any:
    """读 JSON 文件"""
    path = Path(path)
    if not path.exists():
        raise NotFoundException("File", str(path))
    try:
        return json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as e:
        raise DataFormatException(f"{path} is not valid JSON: {e}")


def read_model(path: Path, model: Type[ModelType]) -> ModelType:
    """读 JSON 文件并校验为 pydantic 模型"""
    return model.model_validate(read_json(path))


def read_jsonl(path: Path, model: Type[ModelType]) -> List[ModelType]:
    """读 JSON lines 文件"""
    path = Path(path)
    if not path.exists():
        raise NotFoundException("File", str(path))
    rows = []
    for index, line in enumerate(path.read_text(encoding="utf-8").splitlines()):
        if not line.strip():
            continue
        try:
            rows.append(model.model_validate_json(line))
        except ValueError as e:
            raise DataFormatException(f"{path}: {e}", row_index=index)
    return rows
