"""Precomputed per-instance arrays shared by the solvers."""

from dataclasses import dataclass, field

import numpy as np

from ..models import SystemConfig, TaskSet
from ..schedulability import check_task_set


@dataclass(frozen=True)
class SearchContext:
    """Task set, platform and the N×B×K utilization cube."""

    task_set: TaskSet
    cfg: SystemConfig
    cube: np.ndarray = field(init=False, repr=False)
    ref_utils: np.ndarray = field(init=False, repr=False)

    def __post_init__(self) -> None:
        check_task_set(self.task_set, self.cfg)
        object.__setattr__(self, "cube", self.task_set.utilization_cube())
        object.__setattr__(self, "ref_utils", self.task_set.ref_utilizations())

    def utilizations(self, indices, b: int, k: int) -> np.ndarray:
        """``U(τ_i, b, k)`` for the given task positions; ``inf`` if b or k is 0."""
        if b < 1 or k < 1:
            return np.full(len(indices), np.inf)
        if not len(indices):
            return np.empty(0)
        return self.cube[list(indices), b - 1, k - 1]
