from .exception_handler import (
    EXIT_BUSINESS_ERROR,
    EXIT_OK,
    EXIT_SYSTEM_ERROR,
    run_with_exception_handling,
)

__all__ = [
    "EXIT_BUSINESS_ERROR",
    "EXIT_OK",
    "EXIT_SYSTEM_ERROR",
    "run_with_exception_handling",
]
