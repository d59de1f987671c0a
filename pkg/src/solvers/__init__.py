from .context import SearchContext
from .knapsack import (
    KnapsackInstance,
    KnapsackItem,
    allocate_tasks,
    build_instance,
    knapsack_dp,
    knapsack_oracle,
)
from .mmo import SearchStats, mmo_solve
from .oracle import iter_feasible_solutions, oracle_solve
from .pareto import (
    PartialArchive,
    PartialSolution,
    ParetoSet,
    complete_dominates,
    hypervolume,
    insert_complete,
    not_dominated_by_complete,
    partial_not_dominated,
    prune_partials,
)

__all__ = [
    "KnapsackInstance",
    "KnapsackItem",
    "PartialArchive",
    "PartialSolution",
    "ParetoSet",
    "SearchContext",
    "SearchStats",
    "allocate_tasks",
    "build_instance",
    "complete_dominates",
    "hypervolume",
    "insert_complete",
    "iter_feasible_solutions",
    "knapsack_dp",
    "knapsack_oracle",
    "mmo_solve",
    "not_dominated_by_complete",
    "oracle_solve",
    "partial_not_dominated",
    "prune_partials",
]
