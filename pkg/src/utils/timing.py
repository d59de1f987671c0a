"""Timing utilities: duration logging and cooperative deadlines."""

import logging
import time
from functools import wraps
from typing import Callable, Optional, TypeVar

from ..errors import SolveTimeout

logger = logging.getLogger(__name__)

T = TypeVar('T')


def log_duration(level: int = logging.INFO, label: Optional[str] = None):
    """Decorator for logging how long a function call takes.

    Args:
        level: Logging level for the completion message (default: INFO)
        label: Name to log instead of the function's ``__name__``

    Returns:
        Decorated function that logs its wall-clock duration, also when it raises
    """
    def decorator(func: Callable[..., T]) -> Callable[..., T]:
        name = label or func.__name__

        @wraps(func)
        def wrapper(*args, **kwargs) -> T:
            start = time.perf_counter()
            try:
                result = func(*args, **kwargs)
            except Exception as e:
                elapsed = time.perf_counter() - start
                logger.warning(f"{name} failed after {elapsed:.3f}s: {e}")
                raise
            elapsed = time.perf_counter() - start
            logger.log(level, f"{name} finished in {elapsed:.3f}s")
            return result

        return wrapper
    return decorator


class Deadline:
    """Wall-clock budget checked cooperatively by long-running solvers."""

    def __init__(self, seconds: Optional[float]):
        self.seconds = seconds
        self._expires_at = None if seconds is None else time.monotonic() + seconds

    @property
    def expired(self) -> bool:
        return self._expires_at is not None and time.monotonic() > self._expires_at

    def check(self, where: str = "solver") -> None:
        """Raise :class:`SolveTimeout` once the budget is spent."""
        if self.expired:
            raise SolveTimeout(f"{where} exceeded its {self.seconds:g}s time limit")


NO_DEADLINE = Deadline(None)
