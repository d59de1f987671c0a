"""Tests for synthetic task-set, profile and campaign generation."""

import json
import math
from collections import Counter

import numpy as np
import pytest
from pydantic import ValidationError

from src.errors import GeneratorError
from src.generator import (
    GenSpec,
    campaign_manifest,
    derive_seed,
    generate_campaign,
    generate_periods,
    generate_task_set,
    generate_utilizations,
    load_campaign,
    make_rng,
    default_util_grid,
    synthetic_profile,
    synthetic_profiles,
    write_campaign,
)
from src.services.profile_store import clear_cache


class TestUtilizations:
    """Tests for the bounded-simplex utilization draw."""

    @pytest.mark.parametrize("n,total", [(20, 2.0), (20, 15.0), (40, 4.0), (60, 1.0), (3, 2.9), (5, 5.0)])
    def test_sum_and_bounds(self, n, total):
        """Test that utilizations lie in (0, 1] and sum to the target."""
        rng = make_rng(5)
        for _ in range(200):
            u = generate_utilizations(n, total, rng)

            assert len(u) == n
            assert np.all(u > 0.0) and np.all(u <= 1.0)
            assert math.isclose(math.fsum(u), total, rel_tol=1e-9)

    def test_single_task(self):
        """Test that one task takes the whole target."""
        assert generate_utilizations(1, 0.7, make_rng(0)).tolist() == [0.7]

    @pytest.mark.parametrize("n,total", [(3, 3.5), (3, 0.0), (0, 0.5)])
    def test_infeasible_targets(self, n, total):
        """Test that targets outside (0, n] are rejected."""
        with pytest.raises(GeneratorError):
            generate_utilizations(n, total, make_rng(0))

    def test_periods_are_log_uniform_within_range(self):
        """Test the period range and rough log-scale spread."""
        periods = generate_periods(5000, (10.0, 1000.0), make_rng(8))

        assert periods.min() >= 10.0 and periods.max() <= 1000.0
        assert 0.4 < np.mean(np.log10(periods) < 2.0) < 0.6


class TestGenerateTaskSet:
    """Tests for whole task sets."""

    def test_contract(self, small_pool):
        """Test sizes, totals and profile membership."""
        task_set = generate_task_set(GenSpec(N=20, target_utilization=2.0, profiles=tuple(small_pool), seed=1))

        assert task_set.ids == [f"t{i}" for i in range(20)]
        assert math.isclose(math.fsum(task_set.ref_utilizations()), 2.0, rel_tol=1e-9)
        assert {task.profile.name for task in task_set.tasks} <= {p.name for p in small_pool}
        for task in task_set.tasks:
            assert math.isclose(task.ref_wcet, task.ref_utilization * task.period)

    def test_single_task(self, small_pool):
        """Test the N=1 case."""
        task_set = generate_task_set(GenSpec(N=1, target_utilization=0.7, profiles=tuple(small_pool), seed=4))

        assert task_set.tasks[0].ref_utilization == pytest.approx(0.7)

    def test_same_seed_same_task_set(self, small_pool):
        """Test reproducibility for identical specs."""
        spec = GenSpec(N=10, target_utilization=1.5, profiles=tuple(small_pool), seed=99)

        assert generate_task_set(spec) == generate_task_set(spec)

    def test_different_seed_different_task_set(self, small_pool):
        """Test that the seed matters."""
        a = generate_task_set(GenSpec(N=10, target_utilization=1.5, profiles=tuple(small_pool), seed=1))
        b = generate_task_set(GenSpec(N=10, target_utilization=1.5, profiles=tuple(small_pool), seed=2))

        assert a != b

    def test_target_above_task_count(self, small_pool):
        """Test that 3 tasks cannot carry 3.5."""
        with pytest.raises(GeneratorError):
            generate_task_set(GenSpec(N=3, target_utilization=3.5, profiles=tuple(small_pool), seed=0))

    def test_spec_validation(self, small_pool):
        """Test that a GenSpec needs tasks and profiles."""
        with pytest.raises(ValidationError):
            GenSpec(N=0, target_utilization=1.0, profiles=tuple(small_pool), seed=0)
        with pytest.raises(ValidationError):
            GenSpec(N=2, target_utilization=1.0, profiles=(), seed=0)


class TestSyntheticProfiles:
    """Tests for generated slowdown profiles."""

    def test_profiles_are_monotone(self):
        """Test that no cell needs normalization."""
        for profile in synthetic_profiles(9, 15, 16, seed=3):
            assert profile.changed_cells == 0
            assert profile.grid[-1][-1] == 1.0

    def test_naming_and_reproducibility(self):
        """Test profile names and that a seed fixes the pool."""
        profiles = synthetic_profiles(4, 4, 4, seed=0, prefix="p")

        assert [p.name for p in profiles] == ["p000", "p001", "p002", "p003"]
        assert profiles == synthetic_profiles(4, 4, 4, seed=0, prefix="p")
        assert profiles != synthetic_profiles(4, 4, 4, seed=1, prefix="p")

    def test_unavailable_column(self):
        """Test that the single-cache-partition column can be marked unavailable."""
        profile = synthetic_profile("gap", 3, 3, make_rng(0), unavailable_probability=1.0)

        assert all(not profile.is_available(b, 1) for b in range(1, 4))
        assert profile.is_available(1, 2)

    def test_unknown_kind(self):
        """Test that only the three kinds exist."""
        with pytest.raises(GeneratorError):
            synthetic_profile("x", 2, 2, make_rng(0), kind="memory")


class TestCampaign:
    """Tests for campaign generation and storage."""

    def test_default_grid(self):
        """Test the 31 targets from 1.0 to 4.0."""
        grid = default_util_grid(4)

        assert len(grid) == 31
        assert grid[0] == 1.0 and grid[10] == 2.0 and grid[-1] == 4.0

    def test_campaign_shape(self, small_pool):
        """Test one set per cell over three sizes, the default grid and two pools."""
        pools = {"a": small_pool[:3], "b": small_pool[3:]}

        entries = generate_campaign([20, 40, 60], default_util_grid(4), 1, pools, seed=7)

        assert len(entries) == 3 * 31 * 2
        assert [(e.pool, e.N, e.utilization) for e in entries[:2]] == [("a", 20, 1.0), ("a", 20, 1.1)]

    @pytest.mark.slow
    def test_full_campaign(self, small_pool):
        """Test the 18,600-set campaign: 100 sets per cell, three sizes, 31 targets, two pools."""
        pools = {"a": small_pool[:3], "b": small_pool[3:]}

        entries = generate_campaign([20, 40, 60], default_util_grid(4), 100, pools, seed=7)

        assert len(entries) == 18_600
        cells = Counter((e.pool, e.N, e.utilization) for e in entries)
        assert len(cells) == 186
        assert set(cells.values()) == {100}
        assert len({e.seed for e in entries}) == 18_600
        for entry in entries:
            assert len(entry.task_set) == entry.N
            assert math.fsum(entry.task_set.ref_utilizations()) == pytest.approx(entry.utilization, rel=1e-6)

    def test_single_cell(self, small_pool):
        """Test one size, one target and one repetition."""
        entries = generate_campaign([20], [1.0], 1, {"a": small_pool}, seed=7)

        assert len(entries) == 1
        assert entries[0].task_set.ids[-1] == "t19"

    def test_zero_per_cell(self, small_pool):
        """Test that no repetitions give no task sets."""
        assert generate_campaign([20], [1.0, 2.0], 0, {"a": small_pool}, seed=7) == []

    def test_invalid_requests(self, small_pool):
        """Test negative repetitions and empty pools."""
        with pytest.raises(GeneratorError):
            generate_campaign([20], [1.0], -1, {"a": small_pool}, seed=7)
        with pytest.raises(GeneratorError):
            generate_campaign([20], [1.0], 1, {"a": []}, seed=7)

    def test_slots_are_independent(self, small_pool):
        """Test that a slot's task set does not depend on the rest of the grid."""
        full = generate_campaign([5, 10], [1.0, 2.0], 2, {"a": small_pool}, seed=11)
        alone = generate_campaign([5, 10], [1.0, 2.0], 1, {"a": small_pool}, seed=11)

        assert full[0].task_set == alone[0].task_set
        assert full[0].seed == derive_seed(11, 0, 0, 0, 0)
        assert len({entry.seed for entry in full}) == len(full)

    def test_write_and_load(self, small_pool, tmp_path):
        """Test that a written campaign loads back unchanged."""
        clear_cache()
        pools = {"a": small_pool[:3], "b": small_pool[3:]}
        entries = generate_campaign([4], [1.0, 1.5], 2, pools, seed=3)
        manifest = campaign_manifest(entries, [4], [1.0, 1.5], 2, pools, seed=3)

        path = write_campaign(entries, manifest, pools, tmp_path / "campaign")
        loaded_manifest, loaded = load_campaign(path)

        assert loaded_manifest == manifest
        assert [e.task_set for e in loaded] == [e.task_set for e in entries]
        assert (tmp_path / "campaign" / "tasksets" / "a" / "N4_U1.5_001.json").exists()
        assert loaded_manifest.prng == "PCG64"

    def test_written_campaign_is_reproducible(self, small_pool, tmp_path):
        """Test that the same seed writes byte-identical files."""
        pools = {"a": small_pool[:3], "b": small_pool[3:]}
        for name in ("first", "second"):
            entries = generate_campaign([4, 6], [1.0, 2.5], 3, pools, seed=17)
            manifest = campaign_manifest(entries, [4, 6], [1.0, 2.5], 3, pools, seed=17)
            write_campaign(entries, manifest, pools, tmp_path / name)

        first = {p.relative_to(tmp_path / "first"): p.read_bytes() for p in (tmp_path / "first").rglob("*") if p.is_file()}
        second = {p.relative_to(tmp_path / "second"): p.read_bytes() for p in (tmp_path / "second").rglob("*") if p.is_file()}

        assert len(first) == 2 * 2 * 2 * 3 + len(small_pool) + 1
        assert first == second

    def test_changed_profile_is_detected(self, small_pool, tmp_path):
        """Test the profile hash check on load."""
        clear_cache()
        pools = {"a": small_pool[:2]}
        entries = generate_campaign([3], [1.0], 1, pools, seed=3)
        manifest = campaign_manifest(entries, [3], [1.0], 1, pools, seed=3)
        path = write_campaign(entries, manifest, pools, tmp_path)

        profile_path = tmp_path / "profiles" / "a" / f"{small_pool[0].name}.json"
        document = json.loads(profile_path.read_text())
        document["grid"][0][0] = document["grid"][0][0] + 1.0
        profile_path.write_text(json.dumps(document))

        with pytest.raises(GeneratorError, match="changed"):
            load_campaign(path)
