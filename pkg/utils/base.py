import hashlib
from typing import Union

import numpy as np

Key = Union[str, int]


def stable_key(value: Key) -> int:
    """
    将字符串/整数折叠为 64 位非负整数

    基于 SHA-256，跨进程稳定。
    """
    if isinstance(value, int) and value >= 0:
        return value
    digest = hashlib.sha256(str(value).encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big")


def derive_rng(seed: int, *keys: Key) -> np.random.Generator:
    """
    由主种子与若干键派生独立随机流

    Args:
        seed: 主种子
        keys: 用途标签、代数、claim id 等

    Returns:
        numpy Generator
    """
    entropy = [stable_key(seed)] + [stable_key(key) for key in keys]
    return np.random.default_rng(np.random.SeedSequence(entropy))
