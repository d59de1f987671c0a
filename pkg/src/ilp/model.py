"""0-1 integer program for the co-allocation problem.

Variables (all binary, indices 1-based, tasks by task-set position):

* ``x_i_m``: task ``i`` runs on core ``m``
* ``y_b_m``: core ``m`` gets ``b`` bandwidth partitions
* ``z_k_m``: core ``m`` gets ``k`` cache partitions
* ``a_i_b_k_m``: conjunction of ``x_i_m``, ``y_b_m`` and ``z_k_m``

Constraint rows are named after the family they belong to:

* ``c3_i``: each task on exactly one core
* ``c4_m`` / ``c5_m``: each core picks exactly one bandwidth / cache amount
* ``c6`` / ``c7``: bandwidth / cache totals within ``B`` / ``K``
* ``c8_i_b_k_m`` / ``c9_i_b_k_m``: linearization of the conjunction
* ``c10_m``: EDF utilization bound on core ``m``
* ``fix_i_b_k_m``: ``a`` forced to 0 where the profile cell is unavailable
"""

import logging
import re
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, List, Optional, Tuple, Union

import numpy as np
import pulp

from ..errors import TaskSetError
from ..models import SystemConfig, TaskSet
from ..schedulability import check_task_set

# Configure logging
logger = logging.getLogger(__name__)

Number = Union[int, float]
Term = Tuple[Number, str]

PROBLEM_NAME = "mmo_coalloc"
CONSTRAINT_FAMILIES = ("c3", "c4", "c5", "c6", "c7", "c8", "c9", "c10", "fix")

_VARIABLE_PATTERN = re.compile(r"^(x|y|z|a)((?:_[0-9]+)+)$")
_ARITY = {"x": 2, "y": 2, "z": 2, "a": 4}


class Objective(str, Enum):
    """Single objective to minimize."""

    BANDWIDTH = "b"
    CACHE = "k"
    WEIGHTED = "weighted"


def x_name(i: int, m: int) -> str:
    return f"x_{i}_{m}"


def y_name(b: int, m: int) -> str:
    return f"y_{b}_{m}"


def z_name(k: int, m: int) -> str:
    return f"z_{k}_{m}"


def a_name(i: int, b: int, k: int, m: int) -> str:
    return f"a_{i}_{b}_{k}_{m}"


def parse_variable(name: str) -> Optional[Tuple[str, Tuple[int, ...]]]:
    """Split ``x_1_2`` into ``("x", (1, 2))``; ``None`` if not a model variable name."""
    match = _VARIABLE_PATTERN.match(name)
    if match is None:
        return None
    kind = match.group(1)
    indices = tuple(int(part) for part in match.group(2)[1:].split("_"))
    if len(indices) != _ARITY[kind]:
        return None
    return kind, indices


def row_family(name: str) -> str:
    return name.split("_", 1)[0]


@dataclass(frozen=True, eq=False)
class IlpModel:
    """A pulp problem plus the bookkeeping needed to map it back to tasks."""

    cfg: SystemConfig
    task_ids: Tuple[str, ...]
    objective: Objective
    objective_terms: Tuple[Term, ...]
    variables: Tuple[str, ...]
    problem: pulp.LpProblem = field(repr=False)
    weights: Tuple[float, float] = (1.0, 1.0)

    @property
    def N(self) -> int:
        return len(self.task_ids)

    @property
    def row_names(self) -> List[str]:
        return list(self.problem.constraints)

    def variable_counts(self) -> Dict[str, int]:
        counts = {kind: 0 for kind in ("x", "y", "z", "a")}
        for name in self.variables:
            counts[name.split("_", 1)[0]] += 1
        return counts

    def constraint_counts(self) -> Dict[str, int]:
        counts = {family: 0 for family in CONSTRAINT_FAMILIES}
        for name in self.problem.constraints:
            counts[row_family(name)] += 1
        return counts


def expected_variable_counts(N: int, cfg: SystemConfig) -> Dict[str, int]:
    return {"x": N * cfg.M, "y": cfg.B * cfg.M, "z": cfg.K * cfg.M, "a": N * cfg.B * cfg.K * cfg.M}


def expected_constraint_counts(N: int, cfg: SystemConfig) -> Dict[str, int]:
    """Closed-form row counts, except ``fix`` which depends on the profiles."""
    alpha = N * cfg.B * cfg.K * cfg.M
    return {
        "c3": N,
        "c4": cfg.M,
        "c5": cfg.M,
        "c6": 1,
        "c7": 1,
        "c8": alpha,
        "c9": alpha,
        "c10": cfg.M,
    }


def _objective_terms(objective: Objective, cfg: SystemConfig, weights: Tuple[float, float]) -> List[Term]:
    w_b, w_k = weights
    terms: List[Term] = []
    for m in range(1, cfg.M + 1):
        if objective in (Objective.BANDWIDTH, Objective.WEIGHTED):
            scale = 1 if objective is Objective.BANDWIDTH else w_b
            terms.extend((scale * b, y_name(b, m)) for b in range(1, cfg.B + 1))
        if objective in (Objective.CACHE, Objective.WEIGHTED):
            scale = 1 if objective is Objective.CACHE else w_k
            terms.extend((scale * k, z_name(k, m)) for k in range(1, cfg.K + 1))
    return [term for term in terms if term[0] != 0]


def build_model(
    task_set: TaskSet,
    cfg: SystemConfig,
    objective: Objective = Objective.BANDWIDTH,
    weights: Tuple[float, float] = (1.0, 1.0),
) -> IlpModel:
    """Build the full 0-1 model for ``task_set`` on ``cfg``.

    The weighted objective ``w_b·Σ b·y + w_k·Σ k·z`` yields one Pareto point
    per weight pair at best; it does not recover the whole front.

    Args:
        task_set: Tasks; profiles must match the platform shape
        cfg: Platform shape
        objective: Which resource usage to minimize
        weights: ``(w_b, w_k)`` for :attr:`Objective.WEIGHTED`

    Returns:
        The model; variables and rows are added in a deterministic order

    Raises:
        TaskSetError: If the task set is empty or a profile shape mismatches
    """
    objective = Objective(objective)
    if not len(task_set):
        raise TaskSetError("cannot build a model for an empty task set")
    check_task_set(task_set, cfg)
    if objective is Objective.WEIGHTED and (weights[0] < 0 or weights[1] < 0 or weights == (0, 0)):
        raise ValueError(f"weights must be non-negative and not both zero, got {weights}")
    N, M, B, K = len(task_set), cfg.M, cfg.B, cfg.K
    cube = task_set.utilization_cube()

    names: List[str] = []
    names.extend(x_name(i, m) for i in range(1, N + 1) for m in range(1, M + 1))
    names.extend(y_name(b, m) for b in range(1, B + 1) for m in range(1, M + 1))
    names.extend(z_name(k, m) for k in range(1, K + 1) for m in range(1, M + 1))
    names.extend(
        a_name(i, b, k, m)
        for i in range(1, N + 1) for b in range(1, B + 1) for k in range(1, K + 1) for m in range(1, M + 1)
    )
    var = {name: pulp.LpVariable(name, cat=pulp.LpBinary) for name in names}

    problem = pulp.LpProblem(PROBLEM_NAME, pulp.LpMinimize)
    terms = _objective_terms(objective, cfg, weights)
    problem += (pulp.lpSum(coef * var[name] for coef, name in terms), "obj")

    for i in range(1, N + 1):
        problem += (pulp.lpSum(var[x_name(i, m)] for m in range(1, M + 1)) == 1, f"c3_{i}")
    for m in range(1, M + 1):
        problem += (pulp.lpSum(var[y_name(b, m)] for b in range(1, B + 1)) == 1, f"c4_{m}")
    for m in range(1, M + 1):
        problem += (pulp.lpSum(var[z_name(k, m)] for k in range(1, K + 1)) == 1, f"c5_{m}")
    problem += (
        pulp.lpSum(b * var[y_name(b, m)] for m in range(1, M + 1) for b in range(1, B + 1)) <= B, "c6",
    )
    problem += (
        pulp.lpSum(k * var[z_name(k, m)] for m in range(1, M + 1) for k in range(1, K + 1)) <= K, "c7",
    )

    cells = [
        (i, b, k, m)
        for i in range(1, N + 1) for b in range(1, B + 1) for k in range(1, K + 1) for m in range(1, M + 1)
    ]
    for i, b, k, m in cells:
        operands = var[x_name(i, m)] + var[y_name(b, m)] + var[z_name(k, m)]
        problem += (3 * var[a_name(i, b, k, m)] - operands <= 0, f"c8_{i}_{b}_{k}_{m}")
    for i, b, k, m in cells:
        operands = var[x_name(i, m)] + var[y_name(b, m)] + var[z_name(k, m)]
        problem += (var[a_name(i, b, k, m)] - operands >= -2, f"c9_{i}_{b}_{k}_{m}")

    available = np.isfinite(cube)
    for m in range(1, M + 1):
        problem += (
            pulp.lpSum(
                float(cube[i - 1, b - 1, k - 1]) * var[a_name(i, b, k, m)]
                for i in range(1, N + 1) for b in range(1, B + 1) for k in range(1, K + 1)
                if available[i - 1, b - 1, k - 1]
            ) <= 1,
            f"c10_{m}",
        )
    fixed = 0
    for i, b, k, m in cells:
        if not available[i - 1, b - 1, k - 1]:
            problem += (var[a_name(i, b, k, m)] == 0, f"fix_{i}_{b}_{k}_{m}")
            fixed += 1

    model = IlpModel(
        cfg=cfg,
        task_ids=tuple(task_set.ids),
        objective=objective,
        objective_terms=tuple(terms),
        variables=tuple(names),
        problem=problem,
        weights=(float(weights[0]), float(weights[1])),
    )
    logger.info(
        f"Built 0-1 model: {len(names)} binaries, {len(problem.constraints)} rows "
        f"({fixed} fixed unavailable cells), objective={objective.name}"
    )
    return model
