"""Utilization model and the uniprocessor EDF utilization test."""

import logging
import math
from typing import Iterable

from .errors import TaskSetError
from .models import SystemConfig, TaskSet, TaskSpec

# Configure logging
logger = logging.getLogger(__name__)

# Sentinel for configurations a task cannot run under (no partitions, or a
# profile cell the benchmark never completed in).
INFINITE_UTILIZATION = math.inf


def utilization(task: TaskSpec, b: int, k: int) -> float:
    """Return ``U(τ, b, k) = Û · slowdown(b, k)``.

    Args:
        task: Task whose profile is consulted
        b: Bandwidth partitions given to the core
        k: Cache partitions given to the core

    Returns:
        The utilization, or ``INFINITE_UTILIZATION`` when ``b`` or ``k`` is
        zero or the profile cell is unavailable

    Raises:
        ValueError: If ``b`` or ``k`` exceed the profile's shape
    """
    if b < 1 or k < 1:
        return INFINITE_UTILIZATION
    profile = task.profile
    if b > profile.B or k > profile.K:
        raise ValueError(
            f"(b={b}, k={k}) outside profile '{profile.name}' of shape {profile.B}x{profile.K}"
        )
    return task.ref_utilization * profile.slowdown(b, k)


def total_utilization(values: Iterable[float]) -> float:
    """Correctly rounded sum, so a real total ≤ 1 never rounds above 1."""
    return math.fsum(values)


def edf_schedulable(tasks: Iterable[TaskSpec], b: int, k: int) -> bool:
    """Implicit-deadline EDF test on one core: ``Σ U(τ, b, k) ≤ 1``."""
    return total_utilization(utilization(task, b, k) for task in tasks) <= 1.0


def check_task_set(task_set: TaskSet, cfg: SystemConfig) -> None:
    """Ensure every profile covers exactly the platform's B×K partitions.

    Raises:
        TaskSetError: If any task's profile has a different shape
    """
    for task in task_set.tasks:
        if (task.profile.B, task.profile.K) != (cfg.B, cfg.K):
            raise TaskSetError(
                f"task '{task.id}' uses profile '{task.profile.name}' of shape "
                f"{task.profile.B}x{task.profile.K}, platform has {cfg.B}x{cfg.K}"
            )
