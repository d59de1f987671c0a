"""Metrics and front output files."""

import logging
from pathlib import Path
from typing import List, Union

import pandas as pd

from ..evaluate import MetricsTable, SetResult
from ..models import SolutionFront, SystemConfig
from ..solvers.pareto import ParetoSet
from ..utils.io import write_json

# Configure logging
logger = logging.getLogger(__name__)

SCALAR_METRICS = (
    "sets",
    "schedulable",
    "timeouts",
    "skipped",
    "schedulability_ratio",
    "mean_min_bandwidth",
    "mean_min_cache",
    "runtime_avg",
    "runtime_min",
    "runtime_max",
)

CSV_COLUMNS = ["algorithm", "pool", "N", "utilization", "metric", "value"]


def solution_front(front: ParetoSet, algorithm: str, gamma: Union[int, None] = None) -> SolutionFront:
    """Serializable front, members sorted by ``(used_b, used_k)``."""
    cfg: SystemConfig = front.cfg
    return SolutionFront(
        algorithm=algorithm,
        M=cfg.M,
        B=cfg.B,
        K=cfg.K,
        gamma=gamma,
        hypervolume=front.hypervolume(),
        solutions=front.sorted_members(),
    )


def metrics_frame(table: MetricsTable) -> pd.DataFrame:
    """Long format: one row per cell and metric.

    Histogram bins appear as ``front_size_<n>`` metrics. Missing values
    (no attempted sets in a cell) are left empty.
    """
    rows: List[dict] = []
    for cell in table.cells:
        key = {"algorithm": cell.algorithm, "pool": cell.pool, "N": cell.N, "utilization": cell.utilization}
        for metric in SCALAR_METRICS:
            rows.append({**key, "metric": metric, "value": getattr(cell, metric)})
        for size, count in cell.front_size_histogram.items():
            rows.append({**key, "metric": f"front_size_{size}", "value": count})
    return pd.DataFrame(rows, columns=CSV_COLUMNS)


def write_metrics(table: MetricsTable, out_dir: Union[str, Path]) -> List[Path]:
    """Write ``metrics.csv``, ``results.csv`` and ``summary.json`` to ``out_dir``."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    metrics_path = out_dir / "metrics.csv"
    metrics_frame(table).to_csv(metrics_path, index=False)
    results_path = out_dir / "results.csv"
    pd.DataFrame(
        [result.model_dump() for result in table.results], columns=list(SetResult.model_fields),
    ).to_csv(results_path, index=False)
    summary_path = out_dir / "summary.json"
    write_json(table.model_dump(mode="json", exclude={"results"}), summary_path)
    logger.info(f"Wrote {len(table.cells)} cells to {out_dir}")
    return [metrics_path, results_path, summary_path]
