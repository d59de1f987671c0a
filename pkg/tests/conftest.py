"""Pytest configuration and fixtures."""

import json
import os
from typing import List, Optional, Sequence

import pytest
from unittest.mock import patch

from src.config import Settings, settings
from src.generator import synthetic_profiles
from src.models import SlowdownProfile, SystemConfig, TaskSet, TaskSpec

TEST_ENV = {
    "MMO_LOG_LEVEL": "ERROR",
}


@pytest.fixture(scope="session", autouse=True)
def mock_env_variables():
    """Mock environment variables for testing.

    The shared ``settings`` instance predates the patch and is refreshed from it.
    """
    with patch.dict(os.environ, TEST_ENV):
        fresh = Settings()
        with patch.multiple(settings, **fresh.model_dump()):
            yield


def grid_profile(name: str, grid: Sequence[Sequence[Optional[float]]]) -> SlowdownProfile:
    return SlowdownProfile(
        name=name,
        B=len(grid),
        K=len(grid[0]),
        grid=tuple(tuple(row) for row in grid),
    )


def flat_profile(name: str, B: int, K: int) -> SlowdownProfile:
    return grid_profile(name, [[1.0] * K for _ in range(B)])


def make_task_set(utils: Sequence[float], profiles, period: float = 100.0) -> TaskSet:
    """Tasks ``t0, t1, ...`` with reference utilizations ``utils``.

    ``profiles`` is one profile for every task or a sequence with one per task.
    """
    if isinstance(profiles, SlowdownProfile):
        profiles = [profiles] * len(utils)
    return TaskSet(tasks=tuple(
        TaskSpec(id=f"t{i}", period=period, ref_wcet=u * period, profile=profile)
        for i, (u, profile) in enumerate(zip(utils, profiles))
    ))


@pytest.fixture
def single_core():
    """One core with 2 bandwidth and 2 cache partitions."""
    return SystemConfig(M=1, B=2, K=2)


@pytest.fixture
def trivial_task_set():
    """One task with reference utilization 0.5 on a flat 1x1 profile."""
    return make_task_set([0.5], flat_profile("flat", 1, 1))


@pytest.fixture
def two_cell_profile():
    """2x2 profile whose (1,1) cell is too slow for a 0.5 task.

    A task with Û = 0.5 gets U = 1.2 at (1,1), 0.9 at (2,1) and (1,2), and
    0.5 at (2,2).
    """
    return grid_profile("two-cell", [[2.4, 1.8], [1.8, 1.0]])


@pytest.fixture
def small_pool() -> List[SlowdownProfile]:
    """Synthetic monotone profiles for a 3x3 platform."""
    return synthetic_profiles(6, 3, 3, seed=7)


@pytest.fixture
def full_platform_pool() -> List[SlowdownProfile]:
    """Synthetic monotone profiles for the 15x16 platform."""
    return synthetic_profiles(12, 15, 16, seed=11)


@pytest.fixture
def instance_files(tmp_path):
    """Write a task set and its profiles to disk; returns (tasks path, profiles dir)."""

    def _write(task_set: TaskSet):
        profiles_dir = tmp_path / "profiles"
        profiles_dir.mkdir(exist_ok=True)
        for profile in {task.profile.name: task.profile for task in task_set.tasks}.values():
            (profiles_dir / f"{profile.name}.json").write_text(
                json.dumps(profile.model_dump(mode="json")), encoding="utf-8"
            )
        tasks_path = tmp_path / "tasks.json"
        tasks_path.write_text(json.dumps({"tasks": [
            {"id": t.id, "period": t.period, "ref_wcet": t.ref_wcet, "profile": t.profile.name}
            for t in task_set.tasks
        ]}), encoding="utf-8")
        return tasks_path, profiles_dir

    return _write
