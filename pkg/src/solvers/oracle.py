"""Exact exhaustive solver for desk-size instances.

Every way of grouping the tasks onto at most ``M`` cores is enumerated once,
with groups kept in canonical order (a group's first task has a lower
position than the next group's first task). For each group the minimal
feasible ``(b, k)`` cells are computed, and per-partition resource vectors
are the Pareto-pruned sums of those cells. Only minimal cells matter because
the objectives are sums and feasibility is monotone in both resources.
"""

import logging
import math
from typing import Dict, Iterator, List, Literal, Sequence, Tuple

from ..config import settings
from ..errors import OracleGuardError
from ..models import CompleteSolution, CoreAllocation, SystemConfig, TaskSet
from ..utils.timing import NO_DEADLINE, Deadline, log_duration
from .context import SearchContext
from .pareto import ParetoSet

# Configure logging
logger = logging.getLogger(__name__)

OracleMode = Literal["default", "ilp-compat"]

Cell = Tuple[int, int]
Group = Tuple[int, ...]


def check_guard(task_set: TaskSet, cfg: SystemConfig) -> None:
    """Refuse instances beyond the configured search-space limits.

    Raises:
        OracleGuardError: If N, M, B or K exceeds its limit
    """
    limits = [
        ("N", len(task_set), settings.oracle_max_tasks),
        ("M", cfg.M, settings.oracle_max_cores),
        ("B", cfg.B, settings.oracle_max_bandwidth),
        ("K", cfg.K, settings.oracle_max_cache),
    ]
    exceeded = [f"{name}={value} > {limit}" for name, value, limit in limits if value > limit]
    if exceeded:
        raise OracleGuardError(
            f"instance exceeds the oracle guard ({', '.join(exceeded)}); pass force=True to run anyway"
        )


def set_partitions(n: int, max_groups: int) -> Iterator[Tuple[Group, ...]]:
    """Yield each partition of ``range(n)`` into at most ``max_groups`` groups once.

    Uses restricted-growth strings, so groups come ordered by their first
    element and tasks inside a group keep ascending order.
    """
    if n == 0:
        yield ()
        return
    labels = [0] * n

    def _recurse(i: int, used: int) -> Iterator[Tuple[Group, ...]]:
        if i == n:
            groups: List[List[int]] = [[] for _ in range(used)]
            for task, label in enumerate(labels):
                groups[label].append(task)
            yield tuple(tuple(group) for group in groups)
            return
        for label in range(min(used + 1, max_groups)):
            labels[i] = label
            yield from _recurse(i + 1, max(used, label + 1))

    yield from _recurse(1, 1)


def group_fits(group: Sequence[int], b: int, k: int, context: SearchContext) -> bool:
    """EDF test for ``group`` on a ``(b, k)`` core with a correctly rounded sum."""
    return math.fsum(context.utilizations(group, b, k)) <= 1.0


def minimal_cells(group: Group, context: SearchContext) -> List[Cell]:
    """Pareto-minimal ``(b, k)`` cells under which ``group`` is schedulable.

    Returned in ascending ``b`` (hence descending ``k``). Empty when no cell works.
    """
    cfg = context.cfg
    cells: List[Cell] = []
    best_k = cfg.K + 1
    for b in range(1, cfg.B + 1):
        for k in range(1, best_k):
            if group_fits(group, b, k, context):
                cells.append((b, k))
                best_k = k
                break
        if best_k == 1:
            break
    return cells


def _minimal_vectors(vectors: Dict[Cell, Tuple[Cell, ...]]) -> Dict[Cell, Tuple[Cell, ...]]:
    kept: Dict[Cell, Tuple[Cell, ...]] = {}
    best_k = math.inf
    for vector in sorted(vectors):
        if vector[1] < best_k:
            kept[vector] = vectors[vector]
            best_k = vector[1]
    return kept


def _combine(per_group: Sequence[List[Cell]], cfg: SystemConfig, reserve: int) -> Dict[Cell, Tuple[Cell, ...]]:
    """Pareto-pruned sums of one cell per group, within ``B − reserve`` and ``K − reserve``."""
    sums: Dict[Cell, Tuple[Cell, ...]] = {(0, 0): ()}
    for cells in per_group:
        extended: Dict[Cell, Tuple[Cell, ...]] = {}
        for (used_b, used_k), witness in sums.items():
            for b, k in cells:
                vector = (used_b + b, used_k + k)
                if vector[0] + reserve > cfg.B or vector[1] + reserve > cfg.K:
                    continue
                extended.setdefault(vector, witness + ((b, k),))
        if not extended:
            return {}
        sums = _minimal_vectors(extended)
    return sums


def _build_solution(
    partition: Tuple[Group, ...],
    cells: Sequence[Cell],
    idle_cell: Cell,
    task_set: TaskSet,
    cfg: SystemConfig,
) -> CompleteSolution:
    cores = [
        CoreAllocation(tasks=tuple(task_set.tasks[i].id for i in group), b=b, k=k)
        for group, (b, k) in zip(partition, cells)
    ]
    cores.extend(CoreAllocation(b=idle_cell[0], k=idle_cell[1]) for _ in range(cfg.M - len(partition)))
    return CompleteSolution(cores=tuple(cores))


@log_duration(level=logging.DEBUG)
def oracle_solve(
    task_set: TaskSet,
    cfg: SystemConfig,
    mode: OracleMode = "default",
    *,
    force: bool = False,
    deadline: Deadline = NO_DEADLINE,
) -> ParetoSet:
    """Exact Pareto front over ``(used_b, used_k)``.

    Args:
        task_set: Tasks to place
        cfg: Platform shape
        mode: ``"default"`` leaves cores without tasks idle (no resources);
            ``"ilp-compat"`` gives every such core one partition of each resource
        force: Run even when the instance exceeds the guard
        deadline: Cooperative time limit

    Returns:
        The exact front; empty when no feasible allocation exists

    Raises:
        OracleGuardError: If the instance exceeds the guard and ``force`` is false
        SolveTimeout: If the deadline expires
    """
    if mode not in ("default", "ilp-compat"):
        raise ValueError(f"unknown oracle mode '{mode}'")
    if force:
        logger.info("Oracle guard overridden")
    else:
        check_guard(task_set, cfg)
    context = SearchContext(task_set, cfg)
    front = ParetoSet(cfg)
    cell_cache: Dict[Group, List[Cell]] = {}
    compat = mode == "ilp-compat"
    partitions = 0

    logger.info(f"Oracle search: N={len(task_set)} M={cfg.M} B={cfg.B} K={cfg.K} mode={mode}")
    for partition in set_partitions(len(task_set), cfg.M):
        deadline.check("oracle search")
        partitions += 1
        per_group = []
        for group in partition:
            if group not in cell_cache:
                cell_cache[group] = minimal_cells(group, context)
            per_group.append(cell_cache[group])
        if any(not cells for cells in per_group):
            continue
        idle = cfg.M - len(partition)
        reserve = idle if compat else 0
        if reserve > cfg.B or reserve > cfg.K:
            continue
        idle_cell = (1, 1) if compat else (0, 0)
        for _, witness in _combine(per_group, cfg, reserve).items():
            front.insert(_build_solution(partition, witness, idle_cell, task_set, cfg))

    logger.info(f"Oracle done: {partitions} partitions, {len(front)} non-dominated solutions")
    return front


def _core_cells(group: Group, budget_b: int, budget_k: int, compat: bool, context: SearchContext) -> Iterator[Cell]:
    if not group and not compat:
        yield (0, 0)
        return
    for b in range(1, budget_b + 1):
        for k in range(1, budget_k + 1):
            if not group or group_fits(group, b, k, context):
                yield (b, k)


def iter_feasible_solutions(
    task_set: TaskSet,
    cfg: SystemConfig,
    mode: OracleMode = "default",
    *,
    force: bool = False,
) -> Iterator[CompleteSolution]:
    """Yield every feasible allocation, one per core-symmetry class of task grouping.

    Unlike :func:`oracle_solve` every resource combination is produced, not
    just the minimal ones; used to check that the front is complete.
    """
    if not force:
        check_guard(task_set, cfg)
    context = SearchContext(task_set, cfg)
    compat = mode == "ilp-compat"
    for partition in set_partitions(len(task_set), cfg.M):
        cores: Tuple[Group, ...] = partition + ((),) * (cfg.M - len(partition))

        def _assign(position: int, budget_b: int, budget_k: int, chosen: Tuple[Cell, ...]) -> Iterator[Tuple[Cell, ...]]:
            if position == len(cores):
                yield chosen
                return
            for b, k in _core_cells(cores[position], budget_b, budget_k, compat, context):
                yield from _assign(position + 1, budget_b - b, budget_k - k, chosen + ((b, k),))

        for cells in _assign(0, cfg.B, cfg.K, ()):
            yield CompleteSolution(cores=tuple(
                CoreAllocation(tasks=tuple(task_set.tasks[i].id for i in group), b=b, k=k)
                for group, (b, k) in zip(cores, cells)
            ))
