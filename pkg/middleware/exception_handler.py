import logging
import traceback
from typing import Callable, TypeVar

from pydantic import ValidationError

from exceptions import (
    BaseException,
    DataFormatException,
    DuplicateException,
    ExceptionType,
    NotFoundException,
    SchemaMismatchException,
    ValidationException,
)

logger = logging.getLogger(__name__)

ConfigType = TypeVar("ConfigType")

EXIT_OK = 0
EXIT_SYSTEM_ERROR = 1
EXIT_BUSINESS_ERROR = 2


def run_with_exception_handling(
    handler: Callable[[ConfigType], None], config: ConfigType
) -> int:
    """
    执行命令并把异常映射为退出码

    业务异常（输入/配置问题）-> 2，系统异常与未处理异常 -> 1，成功 -> 0
    """
    try:
        handler(config)
        return EXIT_OK
    except BaseException as exc:
        # 系统异常
        if exc.exception_type == ExceptionType.SYSTEM:
            error_details = f"System exception occurred: {exc.message}"
            if getattr(exc, "original_error", None) is not None:
                error_details += (
                    f" | Original Error: {type(exc.original_error).__name__}: "
                    f"{exc.original_error}"
                )
            logger.error(error_details)
            logger.error(f"Traceback: {traceback.format_exc()}")
            return EXIT_SYSTEM_ERROR

        if isinstance(exc, NotFoundException):
            kind = "Not found"
        elif isinstance(exc, DuplicateException):
            kind = "Duplicate"
        elif isinstance(exc, (DataFormatException, SchemaMismatchException)):
            kind = "Invalid data"
        elif isinstance(exc, ValidationException):
            kind = "Invalid input"
        else:
            kind = "Business error"
        logger.warning(f"{kind}: {exc.message}")
        return EXIT_BUSINESS_ERROR
    except ValidationError as exc:
        error_messages = [
            f"{'.'.join(map(str, err['loc']))}: {err['msg']}" for err in exc.errors()
        ]
        logger.warning(f"Configuration validation failed: {'; '.join(error_messages)}")
        return EXIT_BUSINESS_ERROR
    except Exception as exc:
        logger.error(f"Unhandled error: {type(exc).__name__}: {exc}")
        logger.error(f"Traceback: {traceback.format_exc()}")
        return EXIT_SYSTEM_ERROR
