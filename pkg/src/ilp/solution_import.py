"""Read variable assignments written by external MIP solvers.

The accepted format has one ``name value`` pair per line. Blank lines and
lines starting with ``#`` are skipped, so Gurobi-style ``.sol`` files load
as they are. Values must be binary up to a small tolerance.
"""

import logging
from collections import defaultdict
from pathlib import Path
from typing import Dict, List, Optional, Tuple, Union

from ..errors import MalformedSolutionError
from ..models import CompleteSolution, SystemConfig, TaskSet
from .model import a_name, parse_variable
from .verify import Verdict, assignment_to_solution, verify_assignment

# Configure logging
logger = logging.getLogger(__name__)

BINARY_TOLERANCE = 1e-6


def parse_assignment(text: str, source: str = "<solution>") -> Dict[str, int]:
    """Parse ``name value`` lines into 0/1 values.

    Raises:
        MalformedSolutionError: On a line that is not ``name value``, a
            non-numeric or non-binary value, an unknown name or a repeated name
    """
    values: Dict[str, int] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) != 2:
            raise MalformedSolutionError(f"{source}:{lineno}: expected 'name value', got {line!r}")
        name, token = parts
        if parse_variable(name) is None:
            raise MalformedSolutionError(f"{source}:{lineno}: unknown variable name '{name}'")
        try:
            value = float(token)
        except ValueError:
            raise MalformedSolutionError(f"{source}:{lineno}: value {token!r} is not a number") from None
        if abs(value) <= BINARY_TOLERANCE:
            binary = 0
        elif abs(value - 1.0) <= BINARY_TOLERANCE:
            binary = 1
        else:
            raise MalformedSolutionError(f"{source}:{lineno}: variable '{name}' has non-binary value {token}")
        if name in values:
            raise MalformedSolutionError(f"{source}:{lineno}: variable '{name}' appears twice")
        values[name] = binary
    return values


def _with_conjunctions(values: Dict[str, int]) -> Dict[str, int]:
    # Conjunction variables are derived from x, y and z; solver values for them are ignored.
    tasks: Dict[int, List[int]] = defaultdict(list)
    bandwidth: Dict[int, List[int]] = defaultdict(list)
    cache: Dict[int, List[int]] = defaultdict(list)
    assignment: Dict[str, int] = {}
    for name, value in values.items():
        kind, indices = parse_variable(name)
        if kind == "a":
            continue
        assignment[name] = value
        if not value:
            continue
        if kind == "x":
            tasks[indices[1]].append(indices[0])
        elif kind == "y":
            bandwidth[indices[1]].append(indices[0])
        else:
            cache[indices[1]].append(indices[0])
    for m, positions in tasks.items():
        for i in positions:
            for b in bandwidth.get(m, ()):
                for k in cache.get(m, ()):
                    assignment[a_name(i, b, k, m)] = 1
    return assignment


def import_solver_solution(
    path: Union[str, Path],
    task_set: TaskSet,
    cfg: SystemConfig,
    strict: bool = False,
) -> Tuple[Optional[CompleteSolution], Verdict]:
    """Load a solver assignment and verify it.

    Args:
        path: Assignment file
        task_set: Tasks the ``x`` indices refer to (1-based task-set positions)
        cfg: Platform shape
        strict: Require resources on every core (see :func:`verify_assignment`)

    Returns:
        The rebuilt solution and an ok verdict, or ``None`` and the violations

    Raises:
        MalformedSolutionError: If the file cannot be parsed or sets no x, y or z variable
        StructuralError: If a variable index is out of range for the instance
    """
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise MalformedSolutionError(f"{path}: cannot read file: {e}") from e
    values = parse_assignment(text, str(path))
    if not any(parse_variable(name)[0] in ("x", "y", "z") for name in values):
        raise MalformedSolutionError(f"{path}: no x, y or z variables found")

    assignment = _with_conjunctions(values)
    verdict = verify_assignment(assignment, task_set, cfg, strict=strict)
    if not verdict.ok:
        logger.warning(f"{path}: imported assignment violates {len(verdict.violations)} constraints")
        return None, verdict
    solution = assignment_to_solution(assignment, task_set, cfg)
    logger.info(f"{path}: imported solution uses b={solution.used_b}, k={solution.used_k}")
    return solution, verdict
