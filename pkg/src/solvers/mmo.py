"""Outer layer: breadth-first, core-by-core resource search with Pareto pruning.

Iteration ``m`` extends every live partial solution by one core, trying every
``(b, k)`` within its remaining resources (``b`` outer, ``k`` inner, both
ascending). Three cuts keep the search small:

* a candidate whose remaining resources cannot beat a complete solution is
  skipped before any task placement;
* a partial whose remaining tasks could not fit on the remaining cores even
  with all remaining resources on each core is dropped;
* among partials of the same depth, one with no more resources and no less
  remaining demand than another is dropped.
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Iterator, List, Optional, Tuple

from ..config import settings
from ..models import SystemConfig, TaskSet
from ..utils.timing import NO_DEADLINE, Deadline, log_duration
from .context import SearchContext
from .knapsack import extend, scaled_sizes, select_tasks
from .pareto import PartialArchive, PartialSolution, ParetoSet, not_dominated_by_complete

# Configure logging
logger = logging.getLogger(__name__)


@dataclass
class SearchStats:
    """Counters filled in by :func:`mmo_solve` when passed in."""

    iterations: int = 0
    live_partials: List[int] = field(default_factory=list)
    candidates: int = 0
    dp_calls: int = 0
    rule1_pruned: int = 0
    rule2_pruned: int = 0
    rule3_pruned: int = 0
    leftovers_discarded: int = 0

    @property
    def max_live_partials(self) -> int:
        return max(self.live_partials, default=0)


def feasible_lower_bound(partial: PartialSolution, m: int, cfg: SystemConfig, context: SearchContext) -> bool:
    """Keep ``partial`` unless its remaining tasks provably cannot fit.

    Each remaining task's utilization is taken with every remaining partition
    on its core, a lower bound when profiles are monotone. The partial is
    infeasible when those utilizations sum above the ``M − m`` cores left.
    """
    if not partial.remaining:
        return True
    utils = context.utilizations(partial.remaining, partial.remaining_b, partial.remaining_k)
    return math.fsum(utils) <= cfg.M - m


def _expand_last_core(partial: PartialSolution, b: int, k: int, gamma: int, context: SearchContext) -> Optional[PartialSolution]:
    # On the last core only an all-tasks placement matters, and the DP
    # places everything exactly when everything fits together.
    sizes = scaled_sizes(context.utilizations(partial.remaining, b, k), gamma)
    if int(sizes.max(initial=0)) > gamma or int(sizes.sum()) > gamma:
        return None
    return extend(partial, b, k, partial.remaining, context)


def _candidates(
    partial: PartialSolution,
    front: ParetoSet,
    gamma: int,
    last: bool,
    context: SearchContext,
    stats: SearchStats,
) -> Iterator[Tuple[int, int, Optional[PartialSolution]]]:
    """Lazily yield extensions of ``partial`` that survive the check against ``front``.

    The check reads ``front`` at each step, so consuming the generator while
    inserting into ``front`` gives the inline serial behavior.
    """
    for b in range(1, partial.remaining_b + 1):
        for k in range(1, partial.remaining_k + 1):
            if not not_dominated_by_complete((partial.remaining_b - b, partial.remaining_k - k), front):
                # More of either resource stays dominated.
                stats.rule1_pruned += partial.remaining_k - k + 1
                break
            if last:
                child = _expand_last_core(partial, b, k, gamma, context)
            else:
                stats.dp_calls += 1
                child = extend(partial, b, k, select_tasks(partial, b, k, gamma, context), context)
            yield b, k, child
        else:
            continue
        if k == 1:
            stats.rule1_pruned += (partial.remaining_b - b) * partial.remaining_k
            break


def _merge_candidate(
    child: Optional[PartialSolution],
    m: int,
    last: bool,
    front: ParetoSet,
    archive: PartialArchive,
    context: SearchContext,
    stats: SearchStats,
) -> None:
    stats.candidates += 1
    if child is None:
        stats.leftovers_discarded += 1
        return
    if logger.isEnabledFor(logging.DEBUG):
        child.check_consistency(context.cfg, context.ref_utils)
    if child.is_complete:
        front.insert(child.to_complete(context.task_set))
    elif last:
        stats.leftovers_discarded += 1
    elif feasible_lower_bound(child, m, context.cfg, context):
        archive.add(child)
    else:
        stats.rule2_pruned += 1


@log_duration(level=logging.DEBUG)
def mmo_solve(
    task_set: TaskSet,
    cfg: SystemConfig,
    gamma: Optional[int] = None,
    *,
    threads: int = 1,
    deadline: Deadline = NO_DEADLINE,
    stats: Optional[SearchStats] = None,
) -> ParetoSet:
    """Multi-objective co-allocation search.

    Args:
        task_set: Tasks to place; profiles must match the platform shape
        cfg: Platform (cores, bandwidth and cache partitions)
        gamma: Utilization scaling factor for the knapsack (default from settings)
        threads: Worker threads for candidate expansion; 1 is the reference mode
        deadline: Cooperative time limit
        stats: Optional counters, filled in place

    Returns:
        The non-dominated complete solutions found; empty means the task set
        was not schedulable by this search

    Raises:
        SolveTimeout: If the deadline expires
        TaskSetError: If a profile does not match the platform
    """
    gamma = settings.gamma if gamma is None else gamma
    if gamma < 1:
        raise ValueError(f"gamma must be >= 1, got {gamma}")
    stats = SearchStats() if stats is None else stats
    context = SearchContext(task_set, cfg)
    front = ParetoSet(cfg)
    logger.info(f"MMO search: N={len(task_set)} M={cfg.M} B={cfg.B} K={cfg.K} gamma={gamma} threads={threads}")

    live = [PartialSolution.initial(task_set, cfg)]
    executor = ThreadPoolExecutor(max_workers=threads) if threads > 1 else None
    try:
        for m in range(1, cfg.M + 1):
            deadline.check("MMO search")
            last = m == cfg.M
            archive = PartialArchive()
            if executor is None:
                for partial in live:
                    deadline.check("MMO search")
                    for _, _, child in _candidates(partial, front, gamma, last, context, stats):
                        _merge_candidate(child, m, last, front, archive, context, stats)
            else:
                snapshot = front.copy()
                worker_stats = [SearchStats() for _ in live]
                batches = list(executor.map(
                    lambda job: list(_candidates(job[0], snapshot, gamma, last, context, job[1])),
                    zip(live, worker_stats),
                ))
                deadline.check("MMO search")
                for partial, batch, local in zip(live, batches, worker_stats):
                    stats.dp_calls += local.dp_calls
                    stats.rule1_pruned += local.rule1_pruned
                    for b, k, child in batch:
                        # The front may have grown since the snapshot; apply the serial check.
                        if not not_dominated_by_complete((partial.remaining_b - b, partial.remaining_k - k), front):
                            stats.rule1_pruned += 1
                            continue
                        _merge_candidate(child, m, last, front, archive, context, stats)

            live = archive.survivors()
            stats.rule3_pruned += archive.pruned
            stats.iterations = m
            stats.live_partials.append(len(live))
            logger.debug(f"Iteration {m}: {len(live)} live partials, front size {len(front)}")
            if not live:
                break
    finally:
        if executor is not None:
            executor.shutdown(wait=True)

    logger.info(f"MMO search done: {len(front)} non-dominated solutions, {stats.dp_calls} DP calls")
    return front
