"""Synthetic task sets, slowdown profiles and evaluation campaigns.

All randomness comes from ``numpy.random.Generator`` over the PCG64 bit
generator seeded with an integer, so output is reproducible across runs and
platforms. Per-task-set seeds in a campaign are derived with
``numpy.random.SeedSequence`` from the campaign seed and the cell coordinates.
"""

import logging
import math
from pathlib import Path
from typing import Dict, List, Literal, Mapping, Optional, Sequence, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from .config import settings
from .errors import GeneratorError
from .models import SlowdownProfile, TaskSet, TaskSpec
from .services.profile_store import (
    TaskSetDocument,
    load_profile_dir,
    profile_digest,
    resolve_task_set,
    task_set_document,
    write_profile,
)
from .utils.io import load_model, write_json

# Configure logging
logger = logging.getLogger(__name__)

PRNG_ALGORITHM = "PCG64"
SUM_REL_TOL = 1e-9
MAX_RESCALE_ITERATIONS = 100
MAX_DRAWS = 1000

ProfileKind = Literal["bandwidth", "cache", "mixed"]
PROFILE_KINDS: Tuple[ProfileKind, ...] = ("bandwidth", "cache", "mixed")


def make_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed))


class GenSpec(BaseModel):
    """Parameters of one generated task set."""

    model_config = ConfigDict(frozen=True)

    N: int = Field(ge=1)
    target_utilization: float = Field(gt=0, allow_inf_nan=False)
    profiles: Tuple[SlowdownProfile, ...] = Field(min_length=1)
    period_range: Tuple[float, float] = Field(
        default_factory=lambda: (settings.period_min, settings.period_max)
    )
    seed: int = Field(ge=0, lt=2**64)


def _rescale(u: np.ndarray) -> Optional[np.ndarray]:
    # Clamp components above 1 and hand the excess to the rest in proportion.
    u = u.copy()
    for _ in range(MAX_RESCALE_ITERATIONS):
        over = u > 1.0
        if not over.any():
            return u
        excess = float(np.sum(u[over] - 1.0))
        u[over] = 1.0
        free = u < 1.0
        if not free.any():
            return None
        u[free] += excess * u[free] / float(np.sum(u[free]))
    return None


def _fix_sum(u: np.ndarray, total: float) -> Optional[np.ndarray]:
    diff = total - math.fsum(u)
    if diff == 0.0:
        return u
    room = 1.0 - u if diff > 0 else u
    j = int(np.argmax(room))
    if room[j] <= abs(diff):
        return None
    u = u.copy()
    u[j] += diff
    return u


def generate_utilizations(n: int, total: float, rng: np.random.Generator) -> np.ndarray:
    """``n`` utilizations in ``(0, 1]`` summing to ``total``.

    A flat Dirichlet draw scaled to ``total`` is repaired by iterated
    clamp-and-redistribute; a draw that does not settle is discarded and
    redrawn.

    Raises:
        GeneratorError: If ``total`` is not in ``(0, n]`` or no valid draw is found
    """
    if n < 1:
        raise GeneratorError(f"task count must be >= 1, got {n}")
    if not 0.0 < total <= n:
        raise GeneratorError(f"target utilization {total} outside (0, {n}] for {n} tasks")
    if total == n:
        return np.ones(n)
    for _ in range(MAX_DRAWS):
        u = _rescale(rng.dirichlet(np.ones(n)) * total)
        if u is None or np.any(u <= 0.0):
            continue
        u = _fix_sum(u, total)
        if u is None or np.any(u <= 0.0) or np.any(u > 1.0):
            continue
        if math.isclose(math.fsum(u), total, rel_tol=SUM_REL_TOL):
            return u
    raise GeneratorError(f"no utilization vector found for n={n}, total={total} after {MAX_DRAWS} draws")


def generate_periods(n: int, period_range: Tuple[float, float], rng: np.random.Generator) -> np.ndarray:
    """Log-uniform periods over ``period_range``."""
    low, high = period_range
    if not 0 < low <= high:
        raise GeneratorError(f"invalid period range ({low}, {high})")
    return np.exp(rng.uniform(math.log(low), math.log(high), size=n))


def generate_task_set(spec: GenSpec) -> TaskSet:
    """Random task set for ``spec``; identical output for identical specs.

    Profiles are drawn uniformly with replacement from ``spec.profiles``.
    Task ids are ``t0``, ``t1``, ...
    """
    rng = make_rng(spec.seed)
    utils = generate_utilizations(spec.N, spec.target_utilization, rng)
    periods = generate_periods(spec.N, spec.period_range, rng)
    picks = rng.integers(0, len(spec.profiles), size=spec.N)
    tasks = tuple(
        TaskSpec(
            id=f"t{i}",
            period=float(periods[i]),
            ref_wcet=float(utils[i] * periods[i]),
            profile=spec.profiles[int(picks[i])],
        )
        for i in range(spec.N)
    )
    return TaskSet(tasks=tasks)


def synthetic_profile(
    name: str,
    B: int,
    K: int,
    rng: np.random.Generator,
    kind: ProfileKind = "mixed",
    unavailable_probability: float = 0.0,
) -> SlowdownProfile:
    """Monotone profile ``1 + α·((B−b)/B)^p + β·((K−k)/K)^q``.

    ``kind`` decides which resource dominates the slowdown. With
    ``unavailable_probability`` the single-cache-partition column is marked
    unavailable, as happens for benchmarks whose working set needs more cache.
    """
    if kind == "bandwidth":
        alpha, beta = rng.uniform(0.5, 2.0), rng.uniform(0.0, 0.3)
    elif kind == "cache":
        alpha, beta = rng.uniform(0.0, 0.3), rng.uniform(0.5, 2.0)
    elif kind == "mixed":
        alpha, beta = rng.uniform(0.3, 1.2), rng.uniform(0.3, 1.2)
    else:
        raise GeneratorError(f"unknown profile kind '{kind}'")
    p, q = rng.uniform(1.0, 3.0, size=2)
    b_term = ((B - np.arange(1, B + 1)) / B) ** p
    k_term = ((K - np.arange(1, K + 1)) / K) ** q
    grid = np.round(1.0 + alpha * b_term[:, None] + beta * k_term[None, :], 6)
    rows: List[List[Optional[float]]] = [[float(v) for v in row] for row in grid]
    if K > 1 and rng.random() < unavailable_probability:
        for row in rows:
            row[0] = None
    return SlowdownProfile(name=name, B=B, K=K, grid=tuple(tuple(row) for row in rows))


def synthetic_profiles(
    count: int,
    B: int,
    K: int,
    seed: int,
    prefix: str = "synth",
    unavailable_probability: float = 0.0,
) -> List[SlowdownProfile]:
    """``count`` profiles cycling through the bandwidth, cache and mixed kinds."""
    rng = make_rng(seed)
    return [
        synthetic_profile(
            f"{prefix}{j:03d}", B, K, rng,
            kind=PROFILE_KINDS[j % len(PROFILE_KINDS)],
            unavailable_probability=unavailable_probability,
        )
        for j in range(count)
    ]


def default_util_grid(M: int, start: float = 1.0, step: float = 0.1) -> List[float]:
    """Targets ``start, start+step, ..., M`` rounded to avoid float drift."""
    points = int(round((M - start) / step))
    return [round(start + step * j, 10) for j in range(points + 1)]


def derive_seed(seed: int, *coordinates: int) -> int:
    """64-bit seed for one campaign slot, independent of generation order."""
    sequence = np.random.SeedSequence(seed, spawn_key=tuple(coordinates))
    return int(sequence.generate_state(1, dtype=np.uint64)[0])


class CampaignEntry(BaseModel):
    """One generated task set and where it sits in the campaign grid."""

    model_config = ConfigDict(frozen=True)

    pool: str
    N: int
    utilization: float
    index: int
    seed: int
    task_set: TaskSet


class ManifestEntry(BaseModel):
    pool: str
    N: int
    utilization: float
    index: int
    seed: int
    file: str


class CampaignManifest(BaseModel):
    """Everything needed to regenerate or reload a campaign."""

    prng: str = PRNG_ALGORITHM
    seed: int
    sizes: List[int]
    util_grid: List[float]
    per_cell: int
    period_range: Tuple[float, float]
    pools: Dict[str, Dict[str, str]] = Field(description="pool -> profile name -> sha256")
    entries: List[ManifestEntry] = Field(default_factory=list)


def generate_campaign(
    sizes: Sequence[int],
    util_grid: Sequence[float],
    per_cell: int,
    pools: Mapping[str, Sequence[SlowdownProfile]],
    seed: int,
    period_range: Optional[Tuple[float, float]] = None,
) -> List[CampaignEntry]:
    """Task sets for every pool, size and utilization target.

    Each slot ``(pool, size, target, repetition)`` gets its own derived seed,
    so any single task set can be regenerated on its own.

    Raises:
        GeneratorError: If ``per_cell`` is negative, a pool is empty or a target is infeasible
    """
    if per_cell < 0:
        raise GeneratorError(f"per_cell must be >= 0, got {per_cell}")
    period_range = period_range or (settings.period_min, settings.period_max)
    entries: List[CampaignEntry] = []
    for p, (pool_name, profiles) in enumerate(pools.items()):
        if not profiles:
            raise GeneratorError(f"profile pool '{pool_name}' is empty")
        for s, n in enumerate(sizes):
            for u, target in enumerate(util_grid):
                for rep in range(per_cell):
                    cell_seed = derive_seed(seed, p, s, u, rep)
                    spec = GenSpec(
                        N=n,
                        target_utilization=target,
                        profiles=tuple(profiles),
                        period_range=period_range,
                        seed=cell_seed,
                    )
                    entries.append(CampaignEntry(
                        pool=pool_name, N=n, utilization=target, index=rep, seed=cell_seed,
                        task_set=generate_task_set(spec),
                    ))
        logger.info(f"Pool '{pool_name}': generated {len(sizes) * len(util_grid) * per_cell} task sets")
    return entries


def campaign_manifest(
    entries: Sequence[CampaignEntry],
    sizes: Sequence[int],
    util_grid: Sequence[float],
    per_cell: int,
    pools: Mapping[str, Sequence[SlowdownProfile]],
    seed: int,
    period_range: Optional[Tuple[float, float]] = None,
) -> CampaignManifest:
    return CampaignManifest(
        seed=seed,
        sizes=list(sizes),
        util_grid=list(util_grid),
        per_cell=per_cell,
        period_range=period_range or (settings.period_min, settings.period_max),
        pools={name: {p.name: profile_digest(p) for p in profiles} for name, profiles in pools.items()},
        entries=[
            ManifestEntry(
                pool=e.pool, N=e.N, utilization=e.utilization, index=e.index, seed=e.seed,
                file=f"tasksets/{e.pool}/N{e.N}_U{e.utilization:g}_{e.index:03d}.json",
            )
            for e in entries
        ],
    )


def write_campaign(
    entries: Sequence[CampaignEntry],
    manifest: CampaignManifest,
    pools: Mapping[str, Sequence[SlowdownProfile]],
    out_dir: Union[str, Path],
) -> Path:
    """Write profiles, task sets and ``manifest.json`` under ``out_dir``.

    Returns:
        Path of the manifest
    """
    out_dir = Path(out_dir)
    for name, profiles in pools.items():
        for profile in profiles:
            pool_dir = out_dir / "profiles" / name
            pool_dir.mkdir(parents=True, exist_ok=True)
            write_profile(profile, pool_dir)
    for entry, record in zip(entries, manifest.entries):
        write_json(task_set_document(entry.task_set), out_dir / record.file)
    manifest_path = out_dir / "manifest.json"
    write_json(manifest, manifest_path)
    logger.info(f"Campaign written to {out_dir}: {len(manifest.entries)} task sets")
    return manifest_path


def load_campaign(manifest_path: Union[str, Path]) -> Tuple[CampaignManifest, List[CampaignEntry]]:
    """Read a campaign written by :func:`write_campaign`.

    Profiles are checked against the hashes recorded in the manifest.

    Raises:
        DocumentError: If a file is malformed
        GeneratorError: If a profile no longer matches its recorded hash
    """
    manifest_path = Path(manifest_path)
    root = manifest_path.parent
    manifest = load_model(manifest_path, CampaignManifest)
    pools: Dict[str, Dict[str, SlowdownProfile]] = {}
    for name, digests in manifest.pools.items():
        profiles = load_profile_dir(root / "profiles" / name)
        for profile_name, digest in digests.items():
            profile = profiles.get(profile_name)
            if profile is None or profile_digest(profile) != digest:
                raise GeneratorError(f"{manifest_path}: profile '{profile_name}' in pool '{name}' is missing or changed")
        pools[name] = profiles
    entries = []
    for record in manifest.entries:
        path = root / record.file
        document = load_model(path, TaskSetDocument)
        entries.append(CampaignEntry(
            pool=record.pool, N=record.N, utilization=record.utilization, index=record.index, seed=record.seed,
            task_set=resolve_task_set(str(path), document, pools[record.pool]),
        ))
    logger.info(f"Loaded campaign {manifest_path}: {len(entries)} task sets")
    return manifest, entries
