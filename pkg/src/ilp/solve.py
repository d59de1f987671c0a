"""LP export and optional in-process solving of the 0-1 model through pulp."""

import logging
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Dict, Optional, Union

import pulp

from .model import IlpModel

# Configure logging
logger = logging.getLogger(__name__)


class IlpStatus(Enum):
    """Outcome of a solver run, from best to worst."""

    OPTIMAL = 1
    FEASIBLE = 2
    INFEASIBLE = 3
    NOT_SOLVED = 4

    @staticmethod
    def from_pulp(problem_status: int, solution_status: int) -> "IlpStatus":
        if problem_status == pulp.LpStatusOptimal:
            if solution_status == pulp.LpSolutionOptimal:
                return IlpStatus.OPTIMAL
            return IlpStatus.FEASIBLE
        if problem_status == pulp.LpStatusInfeasible:
            return IlpStatus.INFEASIBLE
        return IlpStatus.NOT_SOLVED


@dataclass(frozen=True)
class IlpResult:
    status: IlpStatus
    objective_value: Optional[float]
    assignment: Dict[str, int]


def export_lp(model: IlpModel, path: Union[str, Path]) -> Path:
    """Write ``model`` to ``path`` in CPLEX LP format.

    Raises:
        OSError: If the file cannot be written
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    model.problem.writeLP(str(path))
    logger.info(f"Wrote LP model to {path} ({len(model.variables)} binaries)")
    return path


def default_solver(time_limit: Optional[float] = None) -> pulp.LpSolver:
    return pulp.PULP_CBC_CMD(msg=False, timeLimit=time_limit)


def solver_available() -> bool:
    return bool(default_solver().available())


def solve_model(
    model: IlpModel,
    solver: Optional[pulp.LpSolver] = None,
    time_limit: Optional[float] = None,
) -> IlpResult:
    """Solve ``model`` with ``solver`` (CBC by default).

    The returned assignment rounds every variable value to 0 or 1. Feed it to
    :func:`~src.ilp.verify.verify_assignment` before trusting it; solvers
    accept small constraint violations.
    """
    solver = solver or default_solver(time_limit)
    model.problem.solve(solver)
    status = IlpStatus.from_pulp(model.problem.status, model.problem.sol_status)
    if status not in (IlpStatus.OPTIMAL, IlpStatus.FEASIBLE):
        logger.info(f"Solver finished without a solution: {status.name}")
        return IlpResult(status=status, objective_value=None, assignment={})
    assignment = {
        variable.name: int(round(variable.varValue))
        for variable in model.problem.variables()
        if variable.varValue is not None
    }
    value = pulp.value(model.problem.objective)
    logger.info(f"Solver finished: {status.name}, objective {value}")
    return IlpResult(status=status, objective_value=float(value), assignment=assignment)
