"""Batch evaluation of solvers over a campaign of task sets.

Every task set is solved independently; results are then grouped per
``(algorithm, pool, N, target utilization)`` cell. A set without any
solution counts as using all ``B`` bandwidth and ``K`` cache partitions in
the usage means.
"""

import logging
import math
import time
from concurrent.futures import ProcessPoolExecutor
from typing import Dict, List, Literal, Optional, Sequence, Tuple

import pandas as pd
from pydantic import BaseModel, Field

from .config import settings
from .errors import OracleGuardError, SolveTimeout
from .generator import CampaignEntry
from .models import SystemConfig, TaskSet
from .schedulability import check_task_set
from .solvers.mmo import mmo_solve
from .solvers.oracle import OracleMode, oracle_solve
from .solvers.pareto import ParetoSet
from .utils.timing import Deadline, log_duration

# Configure logging
logger = logging.getLogger(__name__)

Algorithm = Literal["MMO", "ORACLE"]
SetStatus = Literal["schedulable", "unschedulable", "timeout", "skipped"]
ALGORITHMS: Tuple[Algorithm, ...] = ("MMO", "ORACLE")

CELL_KEYS = ["algorithm", "pool", "N", "utilization"]


class SetResult(BaseModel):
    """Outcome of one algorithm on one task set."""

    algorithm: Algorithm
    pool: str
    N: int
    utilization: float
    index: int
    status: SetStatus
    front_size: int = 0
    min_bandwidth: int
    min_cache: int
    hypervolume: float = 0.0
    runtime: float


class CellMetrics(BaseModel):
    """Aggregated metrics for one ``(algorithm, pool, N, utilization)`` cell."""

    algorithm: Algorithm
    pool: str
    N: int
    utilization: float
    sets: int
    schedulable: int
    timeouts: int
    skipped: int
    schedulability_ratio: Optional[float] = Field(description="percent of attempted sets with a solution")
    mean_min_bandwidth: Optional[float]
    mean_min_cache: Optional[float]
    front_size_histogram: Dict[int, int]
    runtime_avg: float
    runtime_min: float
    runtime_max: float


class MetricsTable(BaseModel):
    """All cells of an evaluation plus the per-set rows they came from."""

    M: int
    B: int
    K: int
    gamma: int
    time_limit: Optional[float] = None
    cells: List[CellMetrics] = Field(default_factory=list)
    results: List[SetResult] = Field(default_factory=list)


def entries_from_task_sets(task_sets: Sequence[TaskSet], pool: str = "default") -> List[CampaignEntry]:
    """Wrap bare task sets; the cell utilization is the set's rounded total."""
    return [
        CampaignEntry(
            pool=pool,
            N=len(task_set),
            utilization=round(math.fsum(task_set.ref_utilizations()), 6),
            index=i,
            seed=0,
            task_set=task_set,
        )
        for i, task_set in enumerate(task_sets)
    ]


def _summarize(front: ParetoSet, cfg: SystemConfig) -> Tuple[int, int]:
    if not front:
        return cfg.B, cfg.K
    return front.min_bandwidth().used_b, front.min_cache().used_k


def evaluate_set(
    entry: CampaignEntry,
    cfg: SystemConfig,
    algorithm: Algorithm,
    gamma: int,
    time_limit: Optional[float] = None,
    oracle_mode: OracleMode = "default",
) -> SetResult:
    """Run ``algorithm`` on one task set and record status, usage and runtime."""
    deadline = Deadline(time_limit)
    start = time.perf_counter()
    common = dict(algorithm=algorithm, pool=entry.pool, N=entry.N, utilization=entry.utilization, index=entry.index)
    try:
        if algorithm == "MMO":
            front = mmo_solve(entry.task_set, cfg, gamma, deadline=deadline)
        else:
            front = oracle_solve(entry.task_set, cfg, oracle_mode, deadline=deadline)
    except SolveTimeout as e:
        logger.warning(f"{algorithm} on {entry.pool}/N={entry.N}/U={entry.utilization}/#{entry.index}: {e}")
        return SetResult(
            **common, status="timeout", min_bandwidth=cfg.B, min_cache=cfg.K,
            runtime=time.perf_counter() - start,
        )
    except OracleGuardError as e:
        logger.info(f"Skipping set #{entry.index}: {e}")
        return SetResult(**common, status="skipped", min_bandwidth=cfg.B, min_cache=cfg.K, runtime=0.0)
    runtime = time.perf_counter() - start
    min_b, min_k = _summarize(front, cfg)
    return SetResult(
        **common,
        status="schedulable" if front else "unschedulable",
        front_size=len(front),
        min_bandwidth=min_b,
        min_cache=min_k,
        hypervolume=front.hypervolume(),
        runtime=runtime,
    )


def _evaluate_job(job) -> SetResult:
    return evaluate_set(*job)


def aggregate(results: Sequence[SetResult]) -> List[CellMetrics]:
    """Group per-set results into cells, sorted by cell key."""
    if not results:
        return []
    frame = pd.DataFrame([result.model_dump() for result in results])
    cells = []
    for key, group in frame.groupby(CELL_KEYS, sort=True):
        algorithm, pool, n, utilization = key
        attempted = group[group["status"] != "skipped"]
        schedulable = attempted[attempted["status"] == "schedulable"]
        histogram = schedulable["front_size"].value_counts().sort_index()
        cells.append(CellMetrics(
            algorithm=algorithm,
            pool=pool,
            N=int(n),
            utilization=float(utilization),
            sets=len(group),
            schedulable=len(schedulable),
            timeouts=int((group["status"] == "timeout").sum()),
            skipped=len(group) - len(attempted),
            schedulability_ratio=100.0 * len(schedulable) / len(attempted) if len(attempted) else None,
            mean_min_bandwidth=float(attempted["min_bandwidth"].mean()) if len(attempted) else None,
            mean_min_cache=float(attempted["min_cache"].mean()) if len(attempted) else None,
            front_size_histogram={int(size): int(count) for size, count in histogram.items()},
            runtime_avg=float(attempted["runtime"].mean()) if len(attempted) else 0.0,
            runtime_min=float(attempted["runtime"].min()) if len(attempted) else 0.0,
            runtime_max=float(attempted["runtime"].max()) if len(attempted) else 0.0,
        ))
    return cells


@log_duration(label="campaign evaluation")
def run_campaign(
    entries: Sequence[CampaignEntry],
    cfg: SystemConfig,
    algorithms: Sequence[Algorithm] = ("MMO",),
    gamma: Optional[int] = None,
    time_limit: Optional[float] = None,
    threads: int = 1,
    oracle_mode: OracleMode = "default",
) -> MetricsTable:
    """Evaluate ``algorithms`` on every campaign entry.

    Args:
        entries: Task sets with their campaign coordinates
        cfg: Platform shared by all task sets
        algorithms: Any of ``"MMO"`` and ``"ORACLE"``; empty gives an empty table
        gamma: Knapsack scaling factor for MMO (default from settings)
        time_limit: Per-set wall-clock limit in seconds
        threads: Worker processes; results do not depend on it
        oracle_mode: Idle-core handling for the oracle

    Raises:
        TaskSetError: If a task set does not match ``cfg``
    """
    gamma = settings.gamma if gamma is None else gamma
    for algorithm in algorithms:
        if algorithm not in ALGORITHMS:
            raise ValueError(f"unknown algorithm '{algorithm}', expected one of {ALGORITHMS}")
    for entry in entries:
        check_task_set(entry.task_set, cfg)

    jobs = [
        (entry, cfg, algorithm, gamma, time_limit, oracle_mode)
        for algorithm in algorithms
        for entry in entries
    ]
    logger.info(f"Evaluating {len(entries)} task sets with {list(algorithms)} ({len(jobs)} runs, {threads} workers)")
    if threads > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=threads) as executor:
            results = list(executor.map(_evaluate_job, jobs, chunksize=max(1, len(jobs) // (4 * threads))))
    else:
        results = []
        for n, job in enumerate(jobs, start=1):
            results.append(_evaluate_job(job))
            if n % 100 == 0:
                logger.info(f"Progress: {n}/{len(jobs)} runs")

    return MetricsTable(
        M=cfg.M, B=cfg.B, K=cfg.K, gamma=gamma, time_limit=time_limit,
        cells=aggregate(results), results=results,
    )


def trend_violations(table: MetricsTable, slack: float = 5.0) -> List[Tuple[CellMetrics, CellMetrics]]:
    """Adjacent-utilization cell pairs whose ratio rises by more than ``slack`` points."""
    series: Dict[Tuple[str, str, int], List[CellMetrics]] = {}
    for cell in table.cells:
        if cell.schedulability_ratio is not None:
            series.setdefault((cell.algorithm, cell.pool, cell.N), []).append(cell)
    violations = []
    for cells in series.values():
        cells.sort(key=lambda c: c.utilization)
        for low, high in zip(cells, cells[1:]):
            if high.schedulability_ratio > low.schedulability_ratio + slack:
                violations.append((low, high))
    return violations
