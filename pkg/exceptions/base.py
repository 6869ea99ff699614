import logging
from enum import Enum
from typing import Optional

logger = logging.getLogger(__name__)


class ExceptionType(str, Enum):
    """异常类型枚举（决定命令行退出码）"""

    BUSINESS = "BUSINESS"  # 输入/配置问题，退出码 2
    SYSTEM = "SYSTEM"  # 运行环境问题，退出码 1


class BaseException(Exception):
    """
    异常基类
    """

    def __init__(
        self,
        message: str,
        error_code: str = "BUSINESS_ERROR",
        exception_type: ExceptionType = ExceptionType.BUSINESS,
    ):
        self.message = message
        self.error_code = error_code
        self.exception_type = exception_type
        super().__init__(self.message)


class NotFoundException(BaseException):
    """文件、claim 或折分配缺失"""

    def __init__(self, resource: str, identifier: str):
        self.resource = resource
        self.identifier = identifier
        super().__init__(f"{resource} '{identifier}' not found", "NOT_FOUND")


class DuplicateException(BaseException):
    """数据集中 claim id 重复"""

    def __init__(self, claim_id: str, row_index: Optional[int] = None):
        self.claim_id = claim_id
        self.row_index = row_index
        where = f" (row {row_index})" if row_index is not None else ""
        super().__init__(f"duplicate claim id '{claim_id}'{where}", "DUPLICATE")


class ValidationException(BaseException):
    """参数或数据不满足前置条件"""

    def __init__(self, message: str):
        super().__init__(message, "VALIDATION_ERROR")


class DataFormatException(BaseException):
    """数据文件格式异常（行号从 0 开始，不含表头）"""

    def __init__(
        self,
        message: str,
        row_index: Optional[int] = None,
        token: Optional[str] = None,
    ):
        self.row_index = row_index
        self.token = token
        if row_index is not None:
            message = f"row {row_index}: {message}"
        super().__init__(message, "DATA_FORMAT_ERROR")


class SchemaMismatchException(BaseException):
    """特征维度与 schema 不一致"""

    def __init__(self, expected: int, actual: int, context: str = "feature vector"):
        self.expected = expected
        self.actual = actual
        message = f"{context} has dimension {actual}, schema expects {expected}"
        super().__init__(message, "SCHEMA_MISMATCH")


class SystemException(BaseException):
    """系统异常（文件写入失败等）"""

    def __init__(self, message: str, original_error: Optional[Exception] = None):
        self.original_error = original_error
        super().__init__(message, "SYSTEM_ERROR", ExceptionType.SYSTEM)
