"""Data models for tasks, resources, slowdown profiles and solutions."""

import logging
import math
from typing import Dict, List, Optional, Tuple

import numpy as np
from pydantic import (
    BaseModel,
    ConfigDict,
    Field,
    PrivateAttr,
    ValidationInfo,
    computed_field,
    field_validator,
)

# Configure logging
logger = logging.getLogger(__name__)


class SystemConfig(BaseModel):
    """Platform shape: cores and the two partitioned shared resources."""

    model_config = ConfigDict(frozen=True)

    M: int = Field(ge=1, description="Number of cores")
    B: int = Field(ge=1, description="Total memory-bandwidth partitions")
    K: int = Field(ge=1, description="Total cache partitions")


class SlowdownProfile(BaseModel):
    """B×K grid of WCET slowdowns relative to full-resource execution.

    ``grid[b-1][k-1]`` is the slowdown with ``b`` bandwidth and ``k`` cache
    partitions; ``None`` marks a configuration where the benchmark did not
    complete. The raw grid is kept as loaded. A monotone copy is derived at
    construction: every cell is raised to at least the value of any cell with
    more resources, and unavailable cells spread toward fewer resources.
    """

    model_config = ConfigDict(frozen=True)

    name: str = Field(min_length=1)
    B: int = Field(ge=1)
    K: int = Field(ge=1)
    grid: Tuple[Tuple[Optional[float], ...], ...]

    _normalized: np.ndarray = PrivateAttr()
    _changed_cells: int = PrivateAttr(default=0)

    @field_validator("grid")
    @classmethod
    def _check_grid(cls, grid, info: ValidationInfo):
        B = info.data.get("B")
        K = info.data.get("K")
        if B is None or K is None:
            return grid
        if len(grid) != B or any(len(row) != K for row in grid):
            raise ValueError(f"grid must have {B} rows of {K} entries")
        for b, row in enumerate(grid, start=1):
            for k, value in enumerate(row, start=1):
                if value is None:
                    continue
                if not math.isfinite(value) or value <= 0:
                    raise ValueError(f"slowdown at (b={b}, k={k}) must be finite and > 0, got {value}")
        if grid[B - 1][K - 1] != 1.0:
            raise ValueError(f"slowdown at full resources (b={B}, k={K}) must be exactly 1.0")
        return grid

    def model_post_init(self, __context) -> None:
        raw = np.array(
            [[math.inf if v is None else float(v) for v in row] for row in self.grid],
            dtype=np.float64,
        )
        swept = np.maximum.accumulate(raw[::-1, :], axis=0)[::-1, :]
        swept = np.maximum.accumulate(swept[:, ::-1], axis=1)[:, ::-1]
        swept = np.ascontiguousarray(swept)
        swept.setflags(write=False)
        self._normalized = swept
        self._changed_cells = int(np.count_nonzero(swept != raw))

    # Private numpy state must stay out of equality.
    def __eq__(self, other: object) -> bool:
        if not isinstance(other, SlowdownProfile):
            return NotImplemented
        return (self.name, self.B, self.K, self.grid) == (other.name, other.B, other.K, other.grid)

    def __hash__(self) -> int:
        return hash((self.name, self.B, self.K, self.grid))

    @property
    def normalized(self) -> np.ndarray:
        """Read-only monotone grid, ``inf`` where unavailable."""
        return self._normalized

    @property
    def changed_cells(self) -> int:
        return self._changed_cells

    @property
    def changed_fraction(self) -> float:
        return self._changed_cells / (self.B * self.K)

    def slowdown(self, b: int, k: int) -> float:
        """Normalized slowdown at ``(b, k)``; ``inf`` when unavailable."""
        return float(self._normalized[b - 1, k - 1])

    def is_available(self, b: int, k: int) -> bool:
        return math.isfinite(self._normalized[b - 1, k - 1])


class TaskSpec(BaseModel):
    """Implicit-deadline sporadic task with a resource-dependent WCET."""

    model_config = ConfigDict(frozen=True)

    id: str = Field(min_length=1)
    period: float = Field(gt=0, allow_inf_nan=False)
    ref_wcet: float = Field(gt=0, allow_inf_nan=False)
    profile: SlowdownProfile

    @field_validator("ref_wcet")
    @classmethod
    def _check_reference_utilization(cls, ref_wcet: float, info: ValidationInfo) -> float:
        period = info.data.get("period")
        if period is not None and ref_wcet / period > 1.0:
            raise ValueError(
                f"reference utilization {ref_wcet / period:.6g} exceeds one full core"
            )
        return ref_wcet

    @property
    def ref_utilization(self) -> float:
        """Reference utilization Û = Ĉ / T."""
        return self.ref_wcet / self.period


class TaskSet(BaseModel):
    """Ordered collection of tasks; order drives DP and tie-breaking."""

    model_config = ConfigDict(frozen=True)

    tasks: Tuple[TaskSpec, ...]

    _cube: Optional[np.ndarray] = PrivateAttr(default=None)

    @field_validator("tasks")
    @classmethod
    def _check_unique_ids(cls, tasks: Tuple[TaskSpec, ...]) -> Tuple[TaskSpec, ...]:
        seen = set()
        for task in tasks:
            if task.id in seen:
                raise ValueError(f"duplicate task id '{task.id}'")
            seen.add(task.id)
        return tasks

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, TaskSet):
            return NotImplemented
        return self.tasks == other.tasks

    def __hash__(self) -> int:
        return hash(self.tasks)

    def __len__(self) -> int:
        return len(self.tasks)

    @property
    def ids(self) -> List[str]:
        return [task.id for task in self.tasks]

    def index_of(self) -> Dict[str, int]:
        return {task.id: i for i, task in enumerate(self.tasks)}

    def ref_utilizations(self) -> np.ndarray:
        return np.array([task.ref_utilization for task in self.tasks], dtype=np.float64)

    def utilization_cube(self) -> np.ndarray:
        """N×B×K array of ``U(τ_i, b, k)`` (``inf`` where unavailable).

        Profiles must all share one shape; callers check it against the
        platform with :func:`src.schedulability.check_task_set`.
        """
        if self._cube is None:
            if not self.tasks:
                cube = np.zeros((0, 1, 1), dtype=np.float64)
            else:
                grids = np.stack([task.profile.normalized for task in self.tasks])
                cube = self.ref_utilizations()[:, None, None] * grids
            cube.setflags(write=False)
            self._cube = cube
        return self._cube


class CoreAllocation(BaseModel):
    """Tasks and resource partitions placed on one core."""

    model_config = ConfigDict(frozen=True)

    tasks: Tuple[str, ...] = ()
    b: int = Field(ge=0)
    k: int = Field(ge=0)


class CompleteSolution(BaseModel):
    """A full allocation; the objectives are the partitions it consumes."""

    model_config = ConfigDict(frozen=True)

    cores: Tuple[CoreAllocation, ...]

    @computed_field
    @property
    def used_b(self) -> int:
        return sum(core.b for core in self.cores)

    @computed_field
    @property
    def used_k(self) -> int:
        return sum(core.k for core in self.cores)

    @property
    def objectives(self) -> Tuple[int, int]:
        return (self.used_b, self.used_k)


class SolutionFront(BaseModel):
    """Serialized result of a solver run."""

    algorithm: str
    M: int
    B: int
    K: int
    gamma: Optional[int] = None
    hypervolume: float
    solutions: List[CompleteSolution]
