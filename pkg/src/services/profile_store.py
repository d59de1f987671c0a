"""Loading and caching of slowdown profiles and task-set documents.

Profiles are shared by many tasks and many task sets in a campaign, so each
file is parsed once per process and the resulting immutable model is reused.
"""

import hashlib
import json
import logging
from functools import lru_cache
from pathlib import Path
from typing import Dict, List, Union

from pydantic import BaseModel, Field

from ..config import settings
from ..errors import ProfileError, TaskSetError
from ..models import SlowdownProfile, TaskSet
from ..utils.io import read_json, validate_document, write_json

# Configure logging
logger = logging.getLogger(__name__)

PathLike = Union[str, Path]


class TaskEntryDocument(BaseModel):
    """One task as stored on disk; the profile is referenced by name."""

    id: str
    period: float
    ref_wcet: float
    profile: str


class TaskSetDocument(BaseModel):
    """Task-set file format."""

    tasks: List[TaskEntryDocument] = Field(default_factory=list)


@lru_cache(maxsize=None)
def _load_profile_cached(resolved: str) -> SlowdownProfile:
    profile = validate_document(resolved, read_json(resolved), SlowdownProfile)
    if profile.changed_cells:
        message = (
            f"Profile '{profile.name}': monotone normalization raised "
            f"{profile.changed_cells}/{profile.B * profile.K} cells"
        )
        if profile.changed_fraction > settings.normalization_warn_fraction:
            logger.warning(message)
        else:
            logger.info(message)
    return profile


def load_profile(path: PathLike) -> SlowdownProfile:
    """Load one profile JSON file (cached per resolved path)."""
    return _load_profile_cached(str(Path(path).resolve()))


@lru_cache(maxsize=None)
def _load_profile_dir_cached(resolved: str) -> Dict[str, SlowdownProfile]:
    directory = Path(resolved)
    if not directory.is_dir():
        raise ProfileError(f"{directory}: profile directory not found")
    profiles: Dict[str, SlowdownProfile] = {}
    for path in sorted(directory.glob("*.json")):
        profile = _load_profile_cached(str(path))
        if profile.name in profiles:
            raise ProfileError(f"{path}: duplicate profile name '{profile.name}'")
        profiles[profile.name] = profile
    logger.info(f"Loaded {len(profiles)} profiles from {directory}")
    return profiles


def load_profile_dir(directory: PathLike) -> Dict[str, SlowdownProfile]:
    """Load every ``*.json`` profile in ``directory`` keyed by profile name."""
    return dict(_load_profile_dir_cached(str(Path(directory).resolve())))


def clear_cache() -> None:
    _load_profile_cached.cache_clear()
    _load_profile_dir_cached.cache_clear()


def resolve_task_set(source: str, document: TaskSetDocument, profiles: Dict[str, SlowdownProfile]) -> TaskSet:
    """Attach profiles to a task-set document and validate the result.

    Raises:
        TaskSetError: If a task references an unknown profile
        DocumentError: If a task violates its invariants
    """
    entries = []
    for i, entry in enumerate(document.tasks):
        profile = profiles.get(entry.profile)
        if profile is None:
            raise TaskSetError(f"{source}: tasks.{i}.profile: unknown profile '{entry.profile}'")
        entries.append({
            "id": entry.id,
            "period": entry.period,
            "ref_wcet": entry.ref_wcet,
            "profile": profile,
        })
    return validate_document(source, {"tasks": entries}, TaskSet)


def load_task_set(path: PathLike, profiles_dir: PathLike) -> TaskSet:
    """Load a task-set file, resolving profile names against ``profiles_dir``."""
    document = validate_document(str(path), read_json(path), TaskSetDocument)
    return resolve_task_set(str(path), document, load_profile_dir(profiles_dir))


def task_set_document(task_set: TaskSet) -> TaskSetDocument:
    return TaskSetDocument(tasks=[
        TaskEntryDocument(
            id=task.id,
            period=task.period,
            ref_wcet=task.ref_wcet,
            profile=task.profile.name,
        )
        for task in task_set.tasks
    ])


def profile_digest(profile: SlowdownProfile) -> str:
    """SHA-256 of the profile's canonical JSON (raw grid)."""
    canonical = json.dumps(profile.model_dump(mode="json"), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


def write_profile(profile: SlowdownProfile, directory: PathLike) -> Path:
    path = Path(directory) / f"{profile.name}.json"
    write_json(profile, path)
    return path
