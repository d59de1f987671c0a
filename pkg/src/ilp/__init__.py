from .model import (
    IlpModel,
    Objective,
    build_model,
    expected_constraint_counts,
    expected_variable_counts,
)
from .solution_import import import_solver_solution, parse_assignment
from .solve import IlpResult, IlpStatus, export_lp, solve_model, solver_available
from .verify import (
    Verdict,
    Violation,
    assignment_to_solution,
    evaluate_rows,
    solution_to_assignment,
    verify_assignment,
    verify_solution,
)

__all__ = [
    "IlpModel",
    "IlpResult",
    "IlpStatus",
    "Objective",
    "Verdict",
    "Violation",
    "assignment_to_solution",
    "build_model",
    "evaluate_rows",
    "expected_constraint_counts",
    "expected_variable_counts",
    "export_lp",
    "import_solver_solution",
    "parse_assignment",
    "solution_to_assignment",
    "solve_model",
    "solver_available",
    "verify_assignment",
    "verify_solution",
]
