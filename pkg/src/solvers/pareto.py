"""Dominance relations and Pareto-set maintenance.

Complete solutions are compared on the two resource objectives
``(used_b, used_k)``. Partial solutions are compared on remaining bandwidth,
remaining cache and remaining reference demand. Exact ties keep the solution
that was generated first.
"""

import logging
import math
from dataclasses import dataclass
from typing import Dict, Iterable, Iterator, List, Optional, Sequence, Tuple

import numpy as np

from ..config import settings
from ..models import CompleteSolution, CoreAllocation, SystemConfig, TaskSet

# Configure logging
logger = logging.getLogger(__name__)


def demand_of(indices: Iterable[int], ref_utils: np.ndarray) -> float:
    """Sum of reference utilizations; order-independent for a given set."""
    return math.fsum(float(ref_utils[i]) for i in indices)


@dataclass(frozen=True, slots=True)
class PartialSolution:
    """Allocation prefix covering the first ``depth`` cores.

    Tasks are referred to by their position in the task set; the remaining
    tuple preserves task-set order.
    """

    task_alloc: Tuple[Tuple[int, ...], ...]
    bw_alloc: Tuple[int, ...]
    cache_alloc: Tuple[int, ...]
    remaining: Tuple[int, ...]
    remaining_b: int
    remaining_k: int
    remaining_demand: float

    @classmethod
    def initial(cls, task_set: TaskSet, cfg: SystemConfig) -> "PartialSolution":
        indices = tuple(range(len(task_set)))
        return cls(
            task_alloc=(),
            bw_alloc=(),
            cache_alloc=(),
            remaining=indices,
            remaining_b=cfg.B,
            remaining_k=cfg.K,
            remaining_demand=demand_of(indices, task_set.ref_utilizations()),
        )

    @property
    def depth(self) -> int:
        return len(self.bw_alloc)

    @property
    def is_complete(self) -> bool:
        return not self.remaining

    def check_consistency(self, cfg: SystemConfig, ref_utils: np.ndarray) -> None:
        """Assert the bookkeeping invariants (debug aid)."""
        assert len(self.task_alloc) == len(self.bw_alloc) == len(self.cache_alloc) <= cfg.M
        assert sum(self.bw_alloc) + self.remaining_b == cfg.B
        assert sum(self.cache_alloc) + self.remaining_k == cfg.K
        placed = [i for core in self.task_alloc for i in core]
        assert sorted(placed + list(self.remaining)) == list(range(len(ref_utils)))
        assert self.remaining_demand == demand_of(self.remaining, ref_utils)

    def to_complete(self, task_set: TaskSet) -> CompleteSolution:
        if self.remaining:
            raise ValueError("partial solution still has unassigned tasks")
        return CompleteSolution(cores=tuple(
            CoreAllocation(tasks=tuple(task_set.tasks[i].id for i in core), b=b, k=k)
            for core, b, k in zip(self.task_alloc, self.bw_alloc, self.cache_alloc)
        ))


def complete_dominates(a: CompleteSolution, b: CompleteSolution) -> bool:
    """True iff ``a`` is no worse in both objectives and better in one."""
    return (
        a.used_b <= b.used_b
        and a.used_k <= b.used_k
        and (a.used_b < b.used_b or a.used_k < b.used_k)
    )


class ParetoSet:
    """Mutually non-dominated complete solutions, one per objective vector."""

    def __init__(self, cfg: SystemConfig):
        self.cfg = cfg
        self.members: List[CompleteSolution] = []

    def __len__(self) -> int:
        return len(self.members)

    def __iter__(self) -> Iterator[CompleteSolution]:
        return iter(self.members)

    def __bool__(self) -> bool:
        return bool(self.members)

    def insert(self, solution: CompleteSolution) -> bool:
        """Insert ``solution`` unless dominated or a duplicate vector.

        Members dominated by the newcomer are dropped.

        Returns:
            True if the solution was added
        """
        vector = solution.objectives
        for member in self.members:
            if member.objectives == vector or complete_dominates(member, solution):
                return False
        self.members = [m for m in self.members if not complete_dominates(solution, m)]
        self.members.append(solution)
        return True

    def objective_vectors(self) -> List[Tuple[int, int]]:
        return sorted(member.objectives for member in self.members)

    def remaining_vectors(self) -> List[Tuple[int, int]]:
        return [(self.cfg.B - m.used_b, self.cfg.K - m.used_k) for m in self.members]

    def sorted_members(self) -> List[CompleteSolution]:
        return sorted(self.members, key=lambda m: m.objectives)

    def min_bandwidth(self) -> Optional[CompleteSolution]:
        return min(self.members, key=lambda m: m.objectives, default=None)

    def min_cache(self) -> Optional[CompleteSolution]:
        return min(self.members, key=lambda m: (m.used_k, m.used_b), default=None)

    def hypervolume(self) -> float:
        return hypervolume(self.objective_vectors(), (self.cfg.B + 1, self.cfg.K + 1))

    def copy(self) -> "ParetoSet":
        clone = ParetoSet(self.cfg)
        clone.members = list(self.members)
        return clone


def insert_complete(front: ParetoSet, solution: CompleteSolution) -> ParetoSet:
    """Functional form of :meth:`ParetoSet.insert`; returns ``front``."""
    front.insert(solution)
    return front


def not_dominated_by_complete(candidate_remaining: Tuple[int, int], front: ParetoSet) -> bool:
    """Pruning against the complete front on remaining resources.

    A candidate survives only if, against every complete solution, it keeps
    strictly more bandwidth or strictly more cache. Equality is dominated.
    """
    rem_b, rem_k = candidate_remaining
    return all(rem_b > front_b or rem_k > front_k for front_b, front_k in front.remaining_vectors())


def _demand_less(a: float, b: float, rel_tol: float) -> bool:
    return a < b and not math.isclose(a, b, rel_tol=rel_tol, abs_tol=0.0)


def partial_not_dominated(
    first: PartialSolution,
    second: PartialSolution,
    rel_tol: Optional[float] = None,
) -> bool:
    """True iff ``first`` keeps more of some resource or has lower demand."""
    if rel_tol is None:
        rel_tol = settings.partial_demand_rel_tol
    return (
        first.remaining_b > second.remaining_b
        or first.remaining_k > second.remaining_k
        or _demand_less(first.remaining_demand, second.remaining_demand, rel_tol)
    )


class PartialArchive:
    """Streaming form of partial-solution pruning.

    Keeps only the best candidate per ``(remaining_b, remaining_k)`` while
    candidates arrive, so memory stays bounded by ``(B+1)(K+1)`` during an
    iteration; :meth:`survivors` applies the cross-key dominance filter.
    """

    def __init__(self, rel_tol: Optional[float] = None):
        self.rel_tol = settings.partial_demand_rel_tol if rel_tol is None else rel_tol
        self._best: Dict[Tuple[int, int], Tuple[int, PartialSolution]] = {}
        self._arrivals = 0
        self.pruned = 0

    def add(self, partial: PartialSolution) -> None:
        key = (partial.remaining_b, partial.remaining_k)
        order = self._arrivals
        self._arrivals += 1
        incumbent = self._best.get(key)
        if incumbent is None:
            self._best[key] = (order, partial)
        elif _demand_less(partial.remaining_demand, incumbent[1].remaining_demand, self.rel_tol):
            self._best[key] = (order, partial)
            self.pruned += 1
        else:
            self.pruned += 1

    def survivors(self) -> List[PartialSolution]:
        """Non-dominated partials in arrival order."""
        entries = sorted(self._best.values(), key=lambda entry: entry[0])
        kept = []
        for _, candidate in entries:
            if all(
                other is candidate or partial_not_dominated(candidate, other, self.rel_tol)
                for _, other in entries
            ):
                kept.append(candidate)
            else:
                self.pruned += 1
        return kept


def prune_partials(partials: Sequence[PartialSolution], rel_tol: Optional[float] = None) -> List[PartialSolution]:
    """Drop partials dominated by another partial at the same depth."""
    archive = PartialArchive(rel_tol)
    for partial in partials:
        archive.add(partial)
    return archive.survivors()


def hypervolume(vectors: Iterable[Tuple[float, float]], reference: Tuple[float, float]) -> float:
    """Area dominated by a 2-D minimization front up to ``reference``."""
    ref_b, ref_k = reference
    area = 0.0
    prev_k = ref_k
    for b, k in sorted(vectors):
        if b >= ref_b or k >= prev_k:
            continue
        area += (ref_b - b) * (prev_k - k)
        prev_k = k
    return float(area)
