"""Unit tests for dominance relations and Pareto-set maintenance."""

import random

import pytest

from src.models import CompleteSolution, CoreAllocation, SystemConfig
from src.solvers.pareto import (
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

CFG = SystemConfig(M=2, B=10, K=10)


def solution(b: int, k: int, tasks=("t0",)) -> CompleteSolution:
    return CompleteSolution(cores=(CoreAllocation(tasks=tuple(tasks), b=b, k=k),))


def partial(rem_b: int, rem_k: int, demand: float) -> PartialSolution:
    return PartialSolution(
        task_alloc=((),),
        bw_alloc=(CFG.B - rem_b,),
        cache_alloc=(CFG.K - rem_k,),
        remaining=(0,),
        remaining_b=rem_b,
        remaining_k=rem_k,
        remaining_demand=demand,
    )


class TestCompleteDominance:
    """Tests for dominance between complete solutions."""

    def test_strictly_better_in_one_objective(self):
        """Test that (3, 4) dominates (3, 5)."""
        assert complete_dominates(solution(3, 4), solution(3, 5))
        assert not complete_dominates(solution(3, 5), solution(3, 4))

    def test_equal_vectors_do_not_dominate(self):
        """Test that identical vectors do not dominate each other."""
        assert not complete_dominates(solution(3, 4), solution(3, 4))

    def test_incomparable_vectors(self):
        """Test that trade-offs are incomparable."""
        assert not complete_dominates(solution(2, 5), solution(5, 2))
        assert not complete_dominates(solution(5, 2), solution(2, 5))


class TestParetoSet:
    """Tests for front insertion."""

    def test_insert_into_empty(self):
        """Test that the first solution is always kept."""
        front = ParetoSet(CFG)

        assert front.insert(solution(5, 5))
        assert front.objective_vectors() == [(5, 5)]

    def test_dominated_newcomer_rejected(self):
        """Test that a dominated solution is not inserted."""
        front = insert_complete(ParetoSet(CFG), solution(3, 3))

        assert not front.insert(solution(4, 3))
        assert front.objective_vectors() == [(3, 3)]

    def test_newcomer_evicts_dominated_members(self):
        """Test that members dominated by a newcomer are removed."""
        front = ParetoSet(CFG)
        for b, k in [(5, 2), (3, 6), (4, 4)]:
            front.insert(solution(b, k))

        front.insert(solution(3, 3))

        assert front.objective_vectors() == [(3, 3), (5, 2)]

    def test_duplicate_vector_keeps_first(self):
        """Test that a tie on both objectives keeps the earlier solution."""
        front = ParetoSet(CFG)
        first = solution(3, 3, tasks=("a",))
        front.insert(first)

        assert not front.insert(solution(3, 3, tasks=("b",)))
        assert front.members == [first]

    def test_members_mutually_non_dominated(self):
        """Test the front invariant under random insertions."""
        rng = random.Random(3)
        front = ParetoSet(CFG)
        for _ in range(300):
            front.insert(solution(rng.randint(1, 10), rng.randint(1, 10)))

        members = list(front)
        for a in members:
            for b in members:
                assert not complete_dominates(a, b)
        assert len({m.objectives for m in members}) == len(members)

    def test_insertion_order_does_not_change_the_front(self):
        """Test that every shuffled insertion order yields the same non-dominated vectors."""
        rng = random.Random(4)
        for _ in range(50):
            points = [solution(rng.randint(1, 10), rng.randint(1, 10)) for _ in range(rng.randint(1, 25))]
            vectors = {p.objectives for p in points}
            expected = sorted(v for v in vectors if not any(
                w[0] <= v[0] and w[1] <= v[1] and w != v for w in vectors
            ))

            for _ in range(10):
                order = points[:]
                rng.shuffle(order)
                front = ParetoSet(CFG)
                for point in order:
                    insert_complete(front, point)

                assert front.objective_vectors() == expected

    def test_insertion_order_keeps_the_same_members_for_distinct_vectors(self):
        """Test member identity when no two candidates tie on both objectives."""
        points = [solution(b, 11 - b, tasks=(f"t{b}",)) for b in range(1, 11)] + [solution(6, 6), solution(9, 9)]
        rng = random.Random(5)
        reference = None
        for _ in range(20):
            rng.shuffle(points)
            front = ParetoSet(CFG)
            for point in points:
                front.insert(point)

            members = sorted(front.members, key=lambda m: m.objectives)
            reference = reference or members
            assert members == reference

    def test_min_selections(self):
        """Test the independent minimum-bandwidth and minimum-cache picks."""
        front = ParetoSet(CFG)
        for b, k in [(2, 8), (5, 3), (7, 1)]:
            front.insert(solution(b, k))

        assert front.min_bandwidth().objectives == (2, 8)
        assert front.min_cache().objectives == (7, 1)

    def test_empty_front_has_no_min(self):
        """Test that an empty front has no minimum solutions."""
        assert ParetoSet(CFG).min_bandwidth() is None


class TestCompleteFrontPruning:
    """Tests for pruning candidates against complete solutions."""

    def test_empty_front_never_prunes(self):
        """Test that nothing is pruned before a solution exists."""
        assert not_dominated_by_complete((0, 0), ParetoSet(CFG))

    def test_equal_remaining_is_pruned(self):
        """Test that matching a complete solution's leftovers is not enough."""
        front = insert_complete(ParetoSet(CFG), solution(6, 6))

        assert not not_dominated_by_complete((4, 4), front)

    def test_more_of_one_resource_survives(self):
        """Test that keeping strictly more bandwidth survives."""
        front = insert_complete(ParetoSet(CFG), solution(6, 6))

        assert not_dominated_by_complete((5, 4), front)
        assert not_dominated_by_complete((0, 5), front)

    def test_must_survive_every_member(self):
        """Test that one dominating member suffices to prune."""
        front = ParetoSet(CFG)
        front.insert(solution(2, 8))
        front.insert(solution(8, 2))

        assert not not_dominated_by_complete((2, 7), front)
        assert not_dominated_by_complete((3, 3), front)


class TestPartialPruning:
    """Tests for dominance between partial solutions."""

    def test_more_resources_survive(self):
        """Test that more remaining bandwidth keeps a partial."""
        assert partial_not_dominated(partial(5, 3, 1.0), partial(4, 3, 0.5))

    def test_lower_demand_survives(self):
        """Test that less remaining demand keeps a partial."""
        assert partial_not_dominated(partial(4, 3, 0.4), partial(4, 3, 0.5))

    def test_equal_partials_dominate_each_other(self):
        """Test that identical partials are mutually dominated."""
        assert not partial_not_dominated(partial(4, 3, 0.5), partial(4, 3, 0.5))

    def test_demand_within_tolerance_counts_as_equal(self):
        """Test that float noise in the demand does not keep a partial alive."""
        assert not partial_not_dominated(partial(4, 3, 0.5 - 1e-16), partial(4, 3, 0.5))

    def test_prune_keeps_first_of_equals(self):
        """Test that exact ties keep the earlier partial."""
        first, second = partial(4, 3, 0.5), partial(4, 3, 0.5)

        kept = prune_partials([first, second])

        assert len(kept) == 1 and kept[0] is first

    def test_prune_removes_cross_key_dominated(self):
        """Test that a partial with fewer resources and more demand is removed."""
        strong = partial(5, 5, 0.3)
        weak = partial(4, 5, 0.6)
        other = partial(6, 2, 0.9)

        assert prune_partials([weak, strong, other]) == [strong, other]

    def test_archive_counts_pruned(self):
        """Test the prune counter of the streaming archive."""
        archive = PartialArchive()
        for p in [partial(4, 4, 0.5), partial(4, 4, 0.4), partial(3, 3, 0.9)]:
            archive.add(p)

        survivors = archive.survivors()

        assert [s.remaining_demand for s in survivors] == [0.4]
        assert archive.pruned == 2

    def test_survivor_count_bounded_by_keys(self):
        """Test that at most one partial per remaining-resource pair survives."""
        rng = random.Random(5)
        partials = [partial(rng.randint(0, 10), rng.randint(0, 10), rng.random()) for _ in range(2000)]

        kept = prune_partials(partials)

        assert len(kept) <= (CFG.B + 1) * (CFG.K + 1)
        assert len({(p.remaining_b, p.remaining_k) for p in kept}) == len(kept)
        for a in kept:
            for b in kept:
                assert a is b or partial_not_dominated(a, b)


class TestHypervolume:
    """Tests for the 2-D hypervolume indicator."""

    def test_single_point(self):
        """Test the rectangle of one point."""
        assert hypervolume([(1, 1)], (3, 3)) == 4.0

    def test_staircase(self):
        """Test a two-point front."""
        assert hypervolume([(1, 2), (2, 1)], (3, 3)) == 3.0

    def test_empty_front(self):
        """Test that an empty front covers nothing."""
        assert hypervolume([], (3, 3)) == 0.0

    def test_dominated_points_ignored(self):
        """Test that adding a dominated point does not change the value."""
        assert hypervolume([(1, 1), (2, 2)], (3, 3)) == hypervolume([(1, 1)], (3, 3))

    def test_front_reference_point(self):
        """Test that a front measures against (B + 1, K + 1)."""
        front = insert_complete(ParetoSet(CFG), solution(10, 10))

        assert front.hypervolume() == pytest.approx(1.0)
