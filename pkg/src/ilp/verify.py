"""Check allocations against the constraints of the 0-1 model.

Two independent evaluations are provided: :func:`verify_assignment` checks
each constraint family directly on variable arrays, and
:func:`evaluate_rows` evaluates the generated rows of an
:class:`~src.ilp.model.IlpModel` term by term. Both report the same row
names, so they can be compared.
"""

import logging
import math
from typing import Dict, List, Mapping, Tuple, Union

import numpy as np
import pulp
from pydantic import BaseModel, ConfigDict, computed_field

from ..errors import MalformedSolutionError, StructuralError
from ..models import CompleteSolution, CoreAllocation, SystemConfig, TaskSet
from ..schedulability import check_task_set
from .model import IlpModel, a_name, parse_variable, x_name, y_name, z_name

# Configure logging
logger = logging.getLogger(__name__)

Assignment = Mapping[str, int]


class Violation(BaseModel):
    """A violated constraint row."""

    model_config = ConfigDict(frozen=True)

    row: str
    family: str
    message: str


class Verdict(BaseModel):
    """Outcome of a verification; ``ok`` when no row is violated."""

    violations: List[Violation] = []

    @computed_field
    @property
    def ok(self) -> bool:
        return not self.violations

    @property
    def rows(self) -> List[str]:
        return [violation.row for violation in self.violations]


def _violation(row: str, message: str) -> Violation:
    return Violation(row=row, family=row.split("_", 1)[0], message=message)


def solution_to_assignment(
    solution: CompleteSolution,
    task_set: TaskSet,
    cfg: SystemConfig,
) -> Tuple[Dict[str, int], List[Violation]]:
    """Variable assignment for ``solution``; cores are numbered in listed order.

    Only variables set to 1 appear. Resource amounts outside ``1..B`` or
    ``1..K`` cannot be expressed as variables and are returned as violations
    of the core's selection row.

    Raises:
        StructuralError: If a task id is unknown or listed twice on a core, or there
            are more than ``M`` cores
    """
    if len(solution.cores) > cfg.M:
        raise StructuralError(f"solution uses {len(solution.cores)} cores, platform has {cfg.M}")
    index = task_set.index_of()
    assignment: Dict[str, int] = {}
    extra: List[Violation] = []
    for m, core in enumerate(solution.cores, start=1):
        positions = []
        for task_id in core.tasks:
            if task_id not in index:
                raise StructuralError(f"core {m} names unknown task '{task_id}'")
            if index[task_id] + 1 in positions:
                raise StructuralError(f"core {m} lists task '{task_id}' twice")
            positions.append(index[task_id] + 1)
            assignment[x_name(index[task_id] + 1, m)] = 1
        if 1 <= core.b <= cfg.B:
            assignment[y_name(core.b, m)] = 1
        elif core.b > cfg.B:
            extra.append(_violation(f"c4_{m}", f"core {m} bandwidth {core.b} outside 1..{cfg.B}"))
        if 1 <= core.k <= cfg.K:
            assignment[z_name(core.k, m)] = 1
        elif core.k > cfg.K:
            extra.append(_violation(f"c5_{m}", f"core {m} cache {core.k} outside 1..{cfg.K}"))
        if 1 <= core.b <= cfg.B and 1 <= core.k <= cfg.K:
            for i in positions:
                assignment[a_name(i, core.b, core.k, m)] = 1
    return assignment, extra


def assignment_arrays(
    assignment: Assignment,
    task_set: TaskSet,
    cfg: SystemConfig,
) -> Tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Dense ``x (N,M)``, ``y (B,M)``, ``z (K,M)`` and ``a (N,B,K,M)`` 0/1 arrays.

    Raises:
        StructuralError: If a name is not a model variable or an index is out of range
        MalformedSolutionError: If a value is not 0 or 1
    """
    N, M, B, K = len(task_set), cfg.M, cfg.B, cfg.K
    arrays = {
        "x": np.zeros((N, M), dtype=np.int64),
        "y": np.zeros((B, M), dtype=np.int64),
        "z": np.zeros((K, M), dtype=np.int64),
        "a": np.zeros((N, B, K, M), dtype=np.int64),
    }
    for name, value in assignment.items():
        parsed = parse_variable(name)
        if parsed is None:
            raise StructuralError(f"'{name}' is not a model variable")
        kind, indices = parsed
        target = arrays[kind]
        if any(not 1 <= idx <= size for idx, size in zip(indices, target.shape)):
            raise StructuralError(f"variable '{name}' is out of range for N={N} M={M} B={B} K={K}")
        if value not in (0, 1):
            raise MalformedSolutionError(f"variable '{name}' must be 0 or 1, got {value!r}")
        target[tuple(idx - 1 for idx in indices)] = int(value)
    return arrays["x"], arrays["y"], arrays["z"], arrays["a"]


def verify_assignment(
    assignment: Assignment,
    task_set: TaskSet,
    cfg: SystemConfig,
    strict: bool = False,
) -> Verdict:
    """Check a 0/1 assignment family by family.

    Args:
        assignment: Variable values; absent variables are 0
        task_set: Tasks the ``x`` and ``a`` indices refer to
        cfg: Platform shape
        strict: Require a bandwidth and a cache amount on every core. When
            false, a core with no task and no resource variable is idle and
            exempt from the selection rows.

    Returns:
        Violations in model row order
    """
    check_task_set(task_set, cfg)
    x, y, z, a = assignment_arrays(assignment, task_set, cfg)
    cube = task_set.utilization_cube()
    ids = task_set.ids
    N, M, B, K = len(task_set), cfg.M, cfg.B, cfg.K
    violations: List[Violation] = []

    for i in range(N):
        count = int(x[i].sum())
        if count != 1:
            violations.append(_violation(f"c3_{i + 1}", f"task '{ids[i]}' is assigned to {count} cores"))

    idle = (x.sum(axis=0) == 0) & (y.sum(axis=0) == 0) & (z.sum(axis=0) == 0)
    for name, family, values, what in (("c4", "bandwidth", y, "B"), ("c5", "cache", z, "K")):
        for m in range(M):
            if not strict and idle[m]:
                continue
            count = int(values[:, m].sum())
            if count != 1:
                violations.append(_violation(f"{name}_{m + 1}", f"core {m + 1} selects {count} {family} amounts"))

    used_b = int((np.arange(1, B + 1)[:, None] * y).sum())
    if used_b > B:
        violations.append(_violation("c6", f"bandwidth total {used_b} exceeds B={B}"))
    used_k = int((np.arange(1, K + 1)[:, None] * z).sum())
    if used_k > K:
        violations.append(_violation("c7", f"cache total {used_k} exceeds K={K}"))

    operands = x[:, None, None, :] + y[None, :, None, :] + z[None, None, :, :]
    for i, b, k, m in np.argwhere(3 * a > operands):
        violations.append(_violation(
            f"c8_{i + 1}_{b + 1}_{k + 1}_{m + 1}",
            f"a_{i + 1}_{b + 1}_{k + 1}_{m + 1} is set without all of its operands",
        ))
    for i, b, k, m in np.argwhere(a < operands - 2):
        violations.append(_violation(
            f"c9_{i + 1}_{b + 1}_{k + 1}_{m + 1}",
            f"a_{i + 1}_{b + 1}_{k + 1}_{m + 1} is unset although all of its operands are set",
        ))

    available = np.isfinite(cube)
    for m in range(M):
        chosen = np.argwhere((a[:, :, :, m] == 1) & available)
        total = math.fsum(float(cube[i, b, k]) for i, b, k in chosen)
        if total > 1.0:
            tasks = ", ".join(sorted({ids[i] for i, _, _ in chosen}))
            violations.append(_violation(
                f"c10_{m + 1}",
                f"core {m + 1} utilization {total:.6g} exceeds 1 (tasks: {tasks})",
            ))
    for i, b, k, m in np.argwhere((a == 1) & ~available[:, :, :, None]):
        violations.append(_violation(
            f"fix_{i + 1}_{b + 1}_{k + 1}_{m + 1}",
            f"task '{ids[i]}' cannot run with b={b + 1}, k={k + 1}",
        ))
    return Verdict(violations=violations)


def verify_solution(
    solution: Union[CompleteSolution, Assignment],
    task_set: TaskSet,
    cfg: SystemConfig,
    strict: bool = False,
) -> Verdict:
    """Check a solution or a raw assignment against every constraint family.

    Raises:
        StructuralError: If the solution names unknown tasks, cores or variables
    """
    if isinstance(solution, CompleteSolution):
        assignment, extra = solution_to_assignment(solution, task_set, cfg)
    else:
        assignment, extra = dict(solution), []
    verdict = verify_assignment(assignment, task_set, cfg, strict=strict)
    reported = set(verdict.rows)
    extra = [violation for violation in extra if violation.row not in reported]
    if extra:
        verdict = Verdict(violations=verdict.violations + extra)
    if verdict.ok:
        logger.debug("Solution satisfies every constraint")
    else:
        logger.info(f"Solution violates {len(verdict.violations)} constraints: {', '.join(verdict.rows[:5])}")
    return verdict


def evaluate_rows(model: IlpModel, assignment: Assignment) -> List[str]:
    """Names of the model rows violated by ``assignment``, in model order."""
    violated = []
    for name, row in model.problem.constraints.items():
        lhs = math.fsum(coef * assignment.get(variable.name, 0) for variable, coef in row.items()) + row.constant
        if row.sense == pulp.LpConstraintLE:
            holds = lhs <= 0
        elif row.sense == pulp.LpConstraintGE:
            holds = lhs >= 0
        else:
            holds = lhs == 0
        if not holds:
            violated.append(name)
    return violated


def assignment_to_solution(assignment: Assignment, task_set: TaskSet, cfg: SystemConfig) -> CompleteSolution:
    """Rebuild per-core allocations from ``x``, ``y`` and ``z``.

    Every one of the ``M`` cores is listed; a core without a selected amount
    reports 0 for it. Assumes each core selects at most one amount per resource.
    """
    x, y, z, _ = assignment_arrays(assignment, task_set, cfg)
    ids = task_set.ids
    cores = []
    for m in range(cfg.M):
        tasks = tuple(ids[i] for i in np.flatnonzero(x[:, m]))
        b_sel = np.flatnonzero(y[:, m])
        k_sel = np.flatnonzero(z[:, m])
        cores.append(CoreAllocation(
            tasks=tasks,
            b=int(b_sel[0]) + 1 if b_sel.size else 0,
            k=int(k_sel[0]) + 1 if k_sel.size else 0,
        ))
    return CompleteSolution(cores=tuple(cores))
