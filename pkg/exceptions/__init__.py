from .base import (
    BaseException,
    NotFoundException,
    DuplicateException,
    ValidationException,
    DataFormatException,
    SchemaMismatchException,
    SystemException,
    ExceptionType,
)

__all__ = [
    "BaseException",
    "NotFoundException",
    "DuplicateException",
    "ValidationException",
    "DataFormatException",
    "SchemaMismatchException",
    "SystemException",
    "ExceptionType",
]
