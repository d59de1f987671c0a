"""Tests for the multi-objective co-allocation search."""

import random
import time

import pytest

from src.errors import SolveTimeout, TaskSetError
from src.generator import GenSpec, generate_task_set, synthetic_profiles
from src.ilp import verify_solution
from src.models import SystemConfig
from src.solvers.context import SearchContext
from src.solvers.mmo import SearchStats, feasible_lower_bound, mmo_solve
from src.solvers.oracle import oracle_solve
from src.solvers.pareto import PartialSolution, complete_dominates
from src.utils.timing import Deadline

from .conftest import flat_profile, make_task_set


def random_task_set(rng: random.Random, pool, n: int, low: float = 0.05, high: float = 0.6):
    return make_task_set([rng.uniform(low, high) for _ in range(n)], [rng.choice(pool) for _ in range(n)])


class TestFeasibleLowerBound:
    """Tests for the remaining-capacity cut."""

    def _partial(self, task_set, cfg, rem_b, rem_k):
        start = PartialSolution.initial(task_set, cfg)
        return PartialSolution(
            task_alloc=((),),
            bw_alloc=(cfg.B - rem_b,),
            cache_alloc=(cfg.K - rem_k,),
            remaining=start.remaining,
            remaining_b=rem_b,
            remaining_k=rem_k,
            remaining_demand=start.remaining_demand,
        )

    def test_demand_above_remaining_cores_is_pruned(self):
        """Test that 2.5 units of demand cannot fit on 2 cores."""
        cfg = SystemConfig(M=3, B=4, K=4)
        task_set = make_task_set([1.0, 1.0, 0.5], flat_profile("flat", 4, 4))
        partial = self._partial(task_set, cfg, 3, 3)

        assert not feasible_lower_bound(partial, 1, cfg, SearchContext(task_set, cfg))

    def test_demand_equal_to_remaining_cores_is_kept(self):
        """Test that the bound is inclusive."""
        cfg = SystemConfig(M=3, B=4, K=4)
        task_set = make_task_set([1.0, 0.5, 0.5], flat_profile("flat", 4, 4))
        partial = self._partial(task_set, cfg, 3, 3)

        assert feasible_lower_bound(partial, 1, cfg, SearchContext(task_set, cfg))

    def test_no_resources_left_is_pruned(self):
        """Test that tasks cannot fit once a resource is exhausted."""
        cfg = SystemConfig(M=3, B=4, K=4)
        task_set = make_task_set([0.1], flat_profile("flat", 4, 4))
        partial = self._partial(task_set, cfg, 0, 2)

        assert not feasible_lower_bound(partial, 1, cfg, SearchContext(task_set, cfg))


class TestMmoSolve:
    """Tests for the search on hand-checked instances."""

    def test_trivial_instance(self):
        """Test the single task, single core, single partition instance."""
        cfg = SystemConfig(M=1, B=1, K=1)
        task_set = make_task_set([0.5], flat_profile("flat", 1, 1))

        front = mmo_solve(task_set, cfg)

        assert front.objective_vectors() == [(1, 1)]
        assert front.members[0].cores[0].tasks == ("t0",)

    def test_two_incomparable_cells(self, single_core, two_cell_profile):
        """Test that both minimal cells of a slow first cell are found."""
        front = mmo_solve(make_task_set([0.5], two_cell_profile), single_core)

        assert front.objective_vectors() == [(1, 2), (2, 1)]

    def test_never_schedulable_gives_empty_front(self):
        """Test that overload on the only core yields no solution."""
        cfg = SystemConfig(M=1, B=1, K=1)
        task_set = make_task_set([0.6, 0.6], flat_profile("flat", 1, 1))

        assert len(mmo_solve(task_set, cfg)) == 0

    def test_spreads_over_cores(self):
        """Test that two heavy tasks end up on separate cores."""
        cfg = SystemConfig(M=2, B=2, K=2)
        task_set = make_task_set([0.7, 0.7], flat_profile("flat", 2, 2))

        front = mmo_solve(task_set, cfg)

        assert front.objective_vectors() == [(2, 2)]
        assert sorted(core.tasks for core in front.members[0].cores) == [("t0",), ("t1",)]

    def test_profile_shape_mismatch(self, small_pool):
        """Test that profiles must match the platform."""
        with pytest.raises(TaskSetError):
            mmo_solve(make_task_set([0.5], small_pool[0]), SystemConfig(M=1, B=2, K=2))

    def test_rejects_non_positive_gamma(self, trivial_task_set):
        """Test the γ precondition."""
        with pytest.raises(ValueError):
            mmo_solve(trivial_task_set, SystemConfig(M=1, B=1, K=1), gamma=0)

    def test_expired_deadline_raises(self, trivial_task_set):
        """Test that an exhausted time budget stops the search."""
        deadline = Deadline(0.0)
        time.sleep(0.01)

        with pytest.raises(SolveTimeout):
            mmo_solve(trivial_task_set, SystemConfig(M=1, B=1, K=1), deadline=deadline)

    def test_stats_are_filled(self, small_pool):
        """Test the search counters."""
        cfg = SystemConfig(M=2, B=3, K=3)
        stats = SearchStats()

        mmo_solve(random_task_set(random.Random(2), small_pool, 4), cfg, stats=stats)

        assert stats.iterations >= 1
        assert len(stats.live_partials) == stats.iterations
        assert stats.dp_calls > 0
        assert stats.candidates > 0


class TestMmoProperties:
    """Property tests on random small instances."""

    def test_every_member_is_feasible(self, small_pool):
        """Test that each front member satisfies every model constraint."""
        rng = random.Random(11)
        cfg = SystemConfig(M=2, B=3, K=3)
        for _ in range(25):
            task_set = random_task_set(rng, small_pool, rng.randint(1, 6))

            for solution in mmo_solve(task_set, cfg):
                assert verify_solution(solution, task_set, cfg).ok

    def test_front_is_mutually_non_dominated(self, small_pool):
        """Test the front invariant."""
        rng = random.Random(12)
        cfg = SystemConfig(M=3, B=3, K=3)
        for _ in range(15):
            members = list(mmo_solve(random_task_set(rng, small_pool, 6), cfg))

            for a in members:
                for b in members:
                    assert not complete_dominates(a, b)

    def test_never_beats_the_oracle(self, small_pool):
        """Test that no member strictly dominates an exact front member."""
        rng = random.Random(13)
        cfg = SystemConfig(M=2, B=3, K=3)
        for _ in range(20):
            task_set = random_task_set(rng, small_pool, rng.randint(2, 6))

            heuristic = mmo_solve(task_set, cfg)
            exact = oracle_solve(task_set, cfg)

            for found in heuristic:
                assert not any(complete_dominates(found, best) for best in exact)
            assert heuristic.hypervolume() <= exact.hypervolume() + 1e-9

    def test_live_partials_bounded(self, small_pool):
        """Test that at most (B+1)(K+1) partials survive each iteration."""
        rng = random.Random(14)
        cfg = SystemConfig(M=3, B=3, K=3)
        for _ in range(10):
            stats = SearchStats()
            mmo_solve(random_task_set(rng, small_pool, 7, 0.05, 0.4), cfg, stats=stats)

            assert stats.max_live_partials <= (cfg.B + 1) * (cfg.K + 1)

    def test_deterministic(self, small_pool):
        """Test that repeated runs return the same solutions in the same order."""
        cfg = SystemConfig(M=2, B=3, K=3)
        task_set = random_task_set(random.Random(15), small_pool, 5)

        assert mmo_solve(task_set, cfg).members == mmo_solve(task_set, cfg).members

    def test_threads_match_serial(self, small_pool):
        """Test that concurrent expansion returns the serial front."""
        rng = random.Random(16)
        cfg = SystemConfig(M=3, B=3, K=3)
        for _ in range(10):
            task_set = random_task_set(rng, small_pool, 6)

            serial = mmo_solve(task_set, cfg)
            threaded = mmo_solve(task_set, cfg, threads=4)

            assert threaded.members == serial.members


@pytest.mark.slow
class TestFullPlatformScale:
    """Runtime on the 4-core, 15x16 platform."""

    def test_sixty_tasks_within_a_minute(self, full_platform_pool):
        """Test N=60 at reference utilization 2.0 finishes in under 60 s."""
        cfg = SystemConfig(M=4, B=15, K=16)
        task_set = generate_task_set(GenSpec(N=60, target_utilization=2.0, profiles=tuple(full_platform_pool), seed=3))
        stats = SearchStats()

        start = time.perf_counter()
        front = mmo_solve(task_set, cfg, stats=stats)
        elapsed = time.perf_counter() - start

        assert elapsed < 60.0
        assert stats.max_live_partials <= 16 * 17
        for solution in front:
            assert verify_solution(solution, task_set, cfg).ok

    def test_live_partials_bounded_on_many_sets(self, full_platform_pool):
        """Test the (B+1)(K+1) = 272 bound over 100 generated sets."""
        cfg = SystemConfig(M=4, B=15, K=16)
        rng = random.Random(19)
        for seed in range(100):
            spec = GenSpec(
                N=rng.choice([10, 20]), target_utilization=round(rng.uniform(1.0, 3.0), 1),
                profiles=tuple(full_platform_pool), seed=seed,
            )
            stats = SearchStats()

            mmo_solve(generate_task_set(spec), cfg, stats=stats)

            assert stats.max_live_partials <= (cfg.B + 1) * (cfg.K + 1)


@pytest.mark.slow
class TestAgainstOracleAtScale:
    """MMO against the exact front on 200 random small instances."""

    def test_random_platforms(self):
        """Test soundness over N ≤ 8, M ≤ 3, B, K ≤ 4, and a non-empty rate of at least 90%."""
        rng = random.Random(23)
        pools = {}
        solvable = found = 0
        for _ in range(200):
            cfg = SystemConfig(M=rng.randint(1, 3), B=rng.randint(1, 4), K=rng.randint(1, 4))
            pool = pools.setdefault((cfg.B, cfg.K), synthetic_profiles(6, cfg.B, cfg.K, seed=10 * cfg.B + cfg.K))
            task_set = random_task_set(rng, pool, rng.randint(1, 8), 0.05, 0.5)

            heuristic = mmo_solve(task_set, cfg)
            exact = oracle_solve(task_set, cfg)

            for solution in heuristic:
                assert verify_solution(solution, task_set, cfg).ok
                assert not any(complete_dominates(solution, best) for best in exact)
            if exact:
                solvable += 1
                found += bool(heuristic)
            else:
                assert not heuristic

        assert solvable >= 20
        assert found / solvable >= 0.9
