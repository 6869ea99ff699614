from .base import derive_rng, stable_key
from .serialization import (
    dumps,
    read_json,
    read_jsonl,
    read_model,
    write_json,
    write_jsonl,
)

__all__ = [
    "derive_rng",
    "stable_key",
    "dumps",
    "read_json",
    "read_jsonl",
    "read_model",
    "write_json",
    "write_jsonl",
]
