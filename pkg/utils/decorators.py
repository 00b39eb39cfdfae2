"""Utility decorators for function behavior modification."""

import time
import functools
from typing import Callable

from core import get_logger

logger = get_logger(__name__)


def timer(func: Callable) -> Callable:
    """Decorator to measure function execution time.

    The duration of the last call is kept on ``wrapper.last_duration``.
    """
    @functools.wraps(func)
    def wrapper(*args, **kwargs):
        start_time = time.perf_counter()
        try:
            return func(*args, **kwargs)
        finally:
            wrapper.last_duration = time.perf_counter() - start_time
            logger.debug(f"{func.__name__} took {wrapper.last_duration:.4f} seconds to execute")
    wrapper.last_duration = 0.0
    return wrapper
