from typing import Iterable

AGENT_PREFIX = "AG"


class AgentIdGenerator:
    """agent 编号生成服务"""

    def __init__(self, prefix: str = AGENT_PREFIX, start: int = 0):
        self.prefix = prefix
        self._max_sequence = start

    @classmethod
    def from_existing(
        cls, ids: Iterable[str], prefix: str = AGENT_PREFIX
    ) -> "AgentIdGenerator":
        """以现有编号中的最大序号为起点"""
        generator = cls(prefix)
        generator._max_sequence = generator._get_max_sequence(ids)
        return generator

    def generate_code(self) -> str:
        """
        生成编码

        Returns:
            生成的编码，格式：前缀_数字，如 AG_1
        """
        self._max_sequence += 1
        return f"{self.prefix}_{self._max_sequence}"

    def _get_max_sequence(self, ids: Iterable[str]) -> int:
        """
        获取最大序号

        Returns:
            最大序号，如果没有找到则返回0
        """
        max_seq = 0
        for code in ids:
            if not self.validate_code_format(code):
                continue
            max_seq = max(max_seq, int(code.split("_")[1]))
        return max_seq

    def validate_code_format(self, code: str) -> bool:
        """验证编码格式是否正确"""
        if not code or not code.startswith(f"{self.prefix}_"):
            return False

        number_part = code[len(self.prefix) + 1 :]
        if not number_part.isdigit():
            return False

        return int(number_part) > 0
