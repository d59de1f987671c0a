"""Inner layer: place a maximum-demand task subset on one core.

Tasks are knapsack items whose value is the reference utilization and whose
size is the utilization under the core's ``(b, k)`` scaled by ``γ`` and
rounded up. A subset whose scaled sizes fit in ``γ`` therefore fits under the
EDF bound. Value ties in the recurrence keep the item out, so backtracking
includes an item only where it strictly improved the table.
"""

import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import FrozenSet, Tuple

import numpy as np

from .context import SearchContext
from .pareto import PartialSolution, demand_of

# Configure logging
logger = logging.getLogger(__name__)

ORACLE_MAX_ITEMS = 20


@dataclass(frozen=True)
class KnapsackItem:
    task_id: str
    size: int
    value: float


@dataclass(frozen=True)
class KnapsackInstance:
    """Items in task-set order and the integer capacity ``γ``."""

    items: Tuple[KnapsackItem, ...]
    capacity: int

    def __post_init__(self) -> None:
        if self.capacity < 1:
            raise ValueError(f"capacity must be >= 1, got {self.capacity}")


def scaled_sizes(utils: np.ndarray, gamma: int) -> np.ndarray:
    """Integer sizes ``⌈U·γ⌉``, never below the exact product.

    A float product can round down onto an integer; those entries are
    re-checked with exact rational arithmetic. Entries that cannot fit (size
    above ``γ``, or infinite utilization) come back as ``γ + 1``.
    """
    utils = np.asarray(utils, dtype=np.float64)
    products = utils * gamma
    sizes = np.full(utils.shape, gamma + 1, dtype=np.int64)
    fits = np.isfinite(products) & (products <= gamma)
    if not fits.any():
        return sizes
    ceiled = np.ceil(products[fits])
    exact = np.flatnonzero(ceiled == products[fits])
    ceiled = ceiled.astype(np.int64)
    if exact.size:
        fit_values = utils[fits]
        for pos in exact:
            if Fraction(float(fit_values[pos])) * gamma > int(ceiled[pos]):
                ceiled[pos] += 1
    sizes[fits] = np.maximum(ceiled, 1)
    return sizes


def solve_knapsack(sizes: np.ndarray, values: np.ndarray, capacity: int) -> Tuple[float, Tuple[int, ...]]:
    """0-1 knapsack by dynamic programming with backtracking.

    Args:
        sizes: Positive integer item sizes
        values: Item values
        capacity: Knapsack capacity

    Returns:
        Best total value and the chosen item positions in ascending order
    """
    n = len(sizes)
    table = np.zeros((n + 1, capacity + 1), dtype=np.float64)
    for i in range(1, n + 1):
        prev = table[i - 1]
        cur = table[i]
        cur[:] = prev
        u = int(sizes[i - 1])
        if u <= capacity:
            np.maximum(prev[u:], prev[:capacity + 1 - u] + values[i - 1], out=cur[u:])

    chosen = []
    j = capacity
    for i in range(n, 0, -1):
        if table[i, j] != table[i - 1, j]:
            chosen.append(i - 1)
            j -= int(sizes[i - 1])
    chosen.reverse()
    return float(table[n, capacity]), tuple(chosen)


def knapsack_dp(instance: KnapsackInstance) -> Tuple[float, FrozenSet[str]]:
    """Solve ``instance`` with the DP used by :func:`allocate_tasks`."""
    sizes = np.array([item.size for item in instance.items], dtype=np.int64)
    values = np.array([item.value for item in instance.items], dtype=np.float64)
    value, chosen = solve_knapsack(sizes, values, instance.capacity)
    return value, frozenset(instance.items[i].task_id for i in chosen)


def knapsack_oracle(instance: KnapsackInstance) -> Tuple[float, FrozenSet[str]]:
    """Exhaustive reference: best value over all ``2^n`` subsets.

    Subset values are summed in item order, as the DP does, so optimal values
    match bit for bit. Ties go to the lexicographically smallest id set.

    Raises:
        ValueError: If the instance has more than 20 items
    """
    n = len(instance.items)
    if n > ORACLE_MAX_ITEMS:
        raise ValueError(f"knapsack oracle supports at most {ORACLE_MAX_ITEMS} items, got {n}")
    if n == 0:
        return 0.0, frozenset()

    masks = np.arange(1 << n, dtype=np.int64)
    bits = ((masks[:, None] >> np.arange(n, dtype=np.int64)) & 1).astype(bool)
    sizes = np.array([item.size for item in instance.items], dtype=np.int64)
    totals = bits.astype(np.int64) @ sizes
    values = np.zeros(1 << n, dtype=np.float64)
    for i, item in enumerate(instance.items):
        values = values + np.where(bits[:, i], item.value, 0.0)

    feasible = totals <= instance.capacity
    best = float(values[feasible].max())
    winners = np.flatnonzero(feasible & (values == best))
    subsets = [
        tuple(sorted(instance.items[i].task_id for i in np.flatnonzero(bits[mask])))
        for mask in winners
    ]
    return best, frozenset(min(subsets))


def build_instance(partial: PartialSolution, b: int, k: int, gamma: int, context: SearchContext) -> KnapsackInstance:
    """Knapsack instance for placing ``partial``'s remaining tasks on a ``(b, k)`` core.

    Tasks with infinite utilization are left out.
    """
    utils = context.utilizations(partial.remaining, b, k)
    sizes = scaled_sizes(utils, gamma)
    items = tuple(
        KnapsackItem(
            task_id=context.task_set.tasks[idx].id,
            size=int(size) if np.isfinite(u) and u <= 1.0 else _unbounded_size(u, gamma),
            value=float(context.ref_utils[idx]),
        )
        for idx, u, size in zip(partial.remaining, utils, sizes)
        if np.isfinite(u)
    )
    return KnapsackInstance(items=items, capacity=gamma)


def _unbounded_size(u: float, gamma: int) -> int:
    return max(int(np.ceil(u * gamma)), gamma + 1)


def select_tasks(partial: PartialSolution, b: int, k: int, gamma: int, context: SearchContext) -> Tuple[int, ...]:
    """Task positions the DP places on a ``(b, k)`` core, in task-set order."""
    remaining = partial.remaining
    if not remaining:
        return ()
    sizes = scaled_sizes(context.utilizations(remaining, b, k), gamma)
    fit = np.flatnonzero(sizes <= gamma)
    if fit.size == 0:
        return ()
    fit_sizes = sizes[fit]
    if int(fit_sizes.sum()) <= gamma:
        # Values are positive, so taking every fitting item is the unique optimum.
        return tuple(remaining[i] for i in fit)
    values = context.ref_utils[[remaining[i] for i in fit]]
    _, chosen = solve_knapsack(fit_sizes, values, gamma)
    return tuple(remaining[fit[i]] for i in chosen)


def extend(partial: PartialSolution, b: int, k: int, placed: Tuple[int, ...], context: SearchContext) -> PartialSolution:
    """Append a core with ``(b, k)`` and the ``placed`` tasks to ``partial``."""
    placed_set = set(placed)
    remaining = tuple(i for i in partial.remaining if i not in placed_set)
    return PartialSolution(
        task_alloc=partial.task_alloc + (placed,),
        bw_alloc=partial.bw_alloc + (b,),
        cache_alloc=partial.cache_alloc + (k,),
        remaining=remaining,
        remaining_b=partial.remaining_b - b,
        remaining_k=partial.remaining_k - k,
        remaining_demand=demand_of(remaining, context.ref_utils),
    )


def allocate_tasks(partial: PartialSolution, b: int, k: int, gamma: int, context: SearchContext) -> PartialSolution:
    """Extend ``partial`` by one core with ``(b, k)`` and a DP-chosen task subset.

    Args:
        partial: Solution to extend
        b: Bandwidth partitions for the new core, ``1 ≤ b ≤ remaining_b``
        k: Cache partitions for the new core, ``1 ≤ k ≤ remaining_k``
        gamma: Utilization scaling factor
        context: Precomputed instance arrays

    Returns:
        The extended partial solution; the new core may hold no tasks
    """
    if not (1 <= b <= partial.remaining_b and 1 <= k <= partial.remaining_k):
        raise ValueError(
            f"(b={b}, k={k}) outside remaining resources "
            f"({partial.remaining_b}, {partial.remaining_k})"
        )
    if gamma < 1:
        raise ValueError(f"gamma must be >= 1, got {gamma}")
    return extend(partial, b, k, select_tasks(partial, b, k, gamma, context), context)
