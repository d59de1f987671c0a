"""Command-line entry point.

Exit codes: 0 success, 1 error (including bad usage), 2 no solution found,
3 constraint violations. Machine-readable output goes to stdout or ``--out``;
logs go to stderr.
"""

import argparse
import logging
import sys
from pathlib import Path
from typing import Callable, Dict, List, Optional, Sequence

from .config import settings
from .errors import CoallocError, DocumentError
from .evaluate import MetricsTable, run_campaign
from .generator import (
    CampaignManifest,
    campaign_manifest,
    generate_campaign,
    load_campaign,
    default_util_grid,
    synthetic_profiles,
    write_campaign,
)
from .ilp import Objective, build_model, export_lp, import_solver_solution, verify_solution
from .ilp.verify import Verdict
from .models import CompleteSolution, SlowdownProfile, SolutionFront, SystemConfig
from .reporting import front_figure, plot_summary, save_figure, solution_front, write_metrics
from .services.profile_store import TaskSetDocument, load_profile_dir, load_task_set, write_profile
from .solvers import mmo_solve, oracle_solve
from .utils.io import load_model, read_json, validate_document, write_json
from .utils.timing import NO_DEADLINE, Deadline

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_EMPTY_FRONT = 2
EXIT_VIOLATIONS = 3

LOG_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"

SCHEMAS: Dict[str, type] = {
    "profile": SlowdownProfile,
    "task_set": TaskSetDocument,
    "system_config": SystemConfig,
    "solution": CompleteSolution,
    "front": SolutionFront,
    "verdict": Verdict,
    "manifest": CampaignManifest,
    "metrics": MetricsTable,
}


class UsageError(CoallocError):
    """Invalid command-line usage."""


class CliParser(argparse.ArgumentParser):
    """Argument parser that reports usage errors instead of exiting with status 2."""

    def error(self, message: str):
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: {message}")


def _platform_options() -> argparse.ArgumentParser:
    parent = argparse.ArgumentParser(add_help=False)
    parent.add_argument("--M", type=int, default=None, help=f"cores (default {settings.cores})")
    parent.add_argument("--B", type=int, default=None, help=f"bandwidth partitions (default {settings.bandwidth_partitions})")
    parent.add_argument("--K", type=int, default=None, help=f"cache partitions (default {settings.cache_partitions})")
    parent.add_argument("--config", type=Path, help="JSON file with M, B and K")
    parent.add_argument("--gamma", type=int, default=None, help=f"knapsack scaling factor (default {settings.gamma})")
    parent.add_argument("--threads", type=int, default=None, help=f"workers (default {settings.threads})")
    parent.add_argument("--seed", type=int, default=0, help="random seed")
    parent.add_argument("--log-level", default=None, help=f"logging level (default {settings.log_level})")
    return parent


def _instance_options(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--tasks", type=Path, required=True, help="task-set JSON file")
    parser.add_argument("--profiles", type=Path, required=True, help="directory of profile JSON files")


def build_parser() -> CliParser:
    common = _platform_options()
    parser = CliParser(prog="mmo-coalloc", description="Co-allocate tasks, bandwidth and cache partitions to cores")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", parents=[common], help="run the MMO search")
    _instance_options(p)
    p.add_argument("--time-limit", type=float, default=None, help="seconds")
    p.add_argument("--out", type=Path)

    p = sub.add_parser("oracle", parents=[common], help="exact exhaustive front for small instances")
    _instance_options(p)
    p.add_argument("--mode", choices=["default", "ilp-compat"], default="default")
    p.add_argument("--force", action="store_true", help="ignore the search-space guard")
    p.add_argument("--time-limit", type=float, default=None, help="seconds")
    p.add_argument("--out", type=Path)

    p = sub.add_parser("generate", parents=[common], help="generate a task-set campaign")
    p.add_argument("--pool", action="append", required=True, metavar="NAME=DIR", help="profile pool (repeatable)")
    p.add_argument("--sizes", type=int, nargs="+", default=[20, 40, 60])
    p.add_argument("--utils", type=float, nargs="+", default=None, help="targets (default 1.0 to M step 0.1)")
    p.add_argument("--per-cell", type=int, default=100)
    p.add_argument("--period-min", type=float, default=None)
    p.add_argument("--period-max", type=float, default=None)
    p.add_argument("--out", type=Path, required=True)

    p = sub.add_parser("evaluate", parents=[common], help="evaluate solvers over a campaign")
    p.add_argument("--campaign", type=Path, required=True, help="campaign manifest.json")
    p.add_argument("--algorithms", nargs="*", choices=["MMO", "ORACLE"], default=["MMO"])
    p.add_argument("--oracle-mode", choices=["default", "ilp-compat"], default="default")
    p.add_argument("--timeout", type=float, default=None, help="per-set seconds")
    p.add_argument("--out", type=Path, required=True)

    p = sub.add_parser("export-ilp", parents=[common], help="write the 0-1 model in LP format")
    _instance_options(p)
    p.add_argument("--objective", choices=[o.value for o in Objective], default="b")
    p.add_argument("--wb", type=float, default=1.0, help="bandwidth weight for --objective weighted")
    p.add_argument("--wk", type=float, default=1.0, help="cache weight for --objective weighted")
    p.add_argument("--out", type=Path, required=True)

    p = sub.add_parser("verify", parents=[common], help="check a solution or front against the constraints")
    _instance_options(p)
    p.add_argument("--solution", type=Path, required=True, help="solution or front JSON")
    p.add_argument("--strict", action="store_true", help="require resources on every core")

    p = sub.add_parser("import-solution", parents=[common], help="load and verify a solver assignment file")
    _instance_options(p)
    p.add_argument("--solution", type=Path, required=True, help="'name value' assignment file")
    p.add_argument("--strict", action="store_true", help="require resources on every core")
    p.add_argument("--out", type=Path)

    p = sub.add_parser("synth-profiles", parents=[common], help="write synthetic monotone profiles")
    p.add_argument("--count", type=int, default=12)
    p.add_argument("--prefix", default="synth")
    p.add_argument("--unavailable-probability", type=float, default=0.0)
    p.add_argument("--out", type=Path, required=True)

    p = sub.add_parser("plot", parents=[common], help="plot an evaluation summary or a front")
    p.add_argument("--summary", type=Path, help="summary.json from evaluate")
    p.add_argument("--front", type=Path, help="front JSON from solve or oracle")
    p.add_argument("--format", choices=["html", "png"], default="html")
    p.add_argument("--out", type=Path, required=True)

    p = sub.add_parser("schema", parents=[common], help="print JSON schemas of all documents")
    p.add_argument("--out", type=Path)
    return parser


def resolve_config(args: argparse.Namespace) -> SystemConfig:
    """Platform from ``--config``, then individual flags, then settings."""
    values = {"M": settings.cores, "B": settings.bandwidth_partitions, "K": settings.cache_partitions}
    if args.config is not None:
        values.update(load_model(args.config, SystemConfig).model_dump())
    for name in ("M", "B", "K"):
        flag = getattr(args, name)
        if flag is not None:
            values[name] = flag
    return validate_document("command line", values, SystemConfig)


def _gamma(args: argparse.Namespace) -> int:
    return settings.gamma if args.gamma is None else args.gamma


def _threads(args: argparse.Namespace) -> int:
    return settings.threads if args.threads is None else args.threads


def _deadline(seconds: Optional[float]) -> Deadline:
    return NO_DEADLINE if seconds is None else Deadline(seconds)


def _emit(document, out: Optional[Path]) -> None:
    write_json(document, out)


def cmd_solve(args: argparse.Namespace, cfg: SystemConfig) -> int:
    task_set = load_task_set(args.tasks, args.profiles)
    gamma = _gamma(args)
    front = mmo_solve(task_set, cfg, gamma, threads=_threads(args), deadline=_deadline(args.time_limit))
    _emit(solution_front(front, "MMO", gamma), args.out)
    return EXIT_OK if front else EXIT_EMPTY_FRONT


def cmd_oracle(args: argparse.Namespace, cfg: SystemConfig) -> int:
    task_set = load_task_set(args.tasks, args.profiles)
    front = oracle_solve(task_set, cfg, args.mode, force=args.force, deadline=_deadline(args.time_limit))
    _emit(solution_front(front, "ORACLE"), args.out)
    return EXIT_OK if front else EXIT_EMPTY_FRONT


def _parse_pools(specs: Sequence[str]) -> Dict[str, List[SlowdownProfile]]:
    pools: Dict[str, List[SlowdownProfile]] = {}
    for spec in specs:
        name, sep, directory = spec.partition("=")
        if not sep:
            name, directory = Path(spec).name, spec
        if name in pools:
            raise UsageError(f"pool '{name}' given twice")
        profiles = load_profile_dir(directory)
        pools[name] = [profiles[key] for key in sorted(profiles)]
    return pools


def cmd_generate(args: argparse.Namespace, cfg: SystemConfig) -> int:
    pools = _parse_pools(args.pool)
    utils = args.utils if args.utils else default_util_grid(cfg.M)
    period_range = (
        settings.period_min if args.period_min is None else args.period_min,
        settings.period_max if args.period_max is None else args.period_max,
    )
    entries = generate_campaign(args.sizes, utils, args.per_cell, pools, args.seed, period_range)
    manifest = campaign_manifest(entries, args.sizes, utils, args.per_cell, pools, args.seed, period_range)
    path = write_campaign(entries, manifest, pools, args.out)
    _emit({"manifest": str(path), "task_sets": len(entries)}, None)
    return EXIT_OK


def cmd_evaluate(args: argparse.Namespace, cfg: SystemConfig) -> int:
    _, entries = load_campaign(args.campaign)
    table = run_campaign(
        entries, cfg, args.algorithms,
        gamma=_gamma(args), time_limit=args.timeout, threads=_threads(args), oracle_mode=args.oracle_mode,
    )
    paths = write_metrics(table, args.out)
    _emit({"outputs": [str(p) for p in paths], "cells": len(table.cells)}, None)
    return EXIT_OK


def cmd_export_ilp(args: argparse.Namespace, cfg: SystemConfig) -> int:
    task_set = load_task_set(args.tasks, args.profiles)
    model = build_model(task_set, cfg, Objective(args.objective), (args.wb, args.wk))
    export_lp(model, args.out)
    return EXIT_OK


def _load_solutions(path: Path) -> List[CompleteSolution]:
    data = read_json(path)
    if isinstance(data, dict) and "solutions" in data:
        return list(validate_document(str(path), data, SolutionFront).solutions)
    return [validate_document(str(path), data, CompleteSolution)]


def _report(verdicts: List[Verdict]) -> int:
    ok = all(v.ok for v in verdicts)
    payload = verdicts[0] if len(verdicts) == 1 else {"ok": ok, "verdicts": [v.model_dump(mode="json") for v in verdicts]}
    _emit(payload, None)
    for verdict in verdicts:
        for violation in verdict.violations:
            print(f"{violation.row}: {violation.message}", file=sys.stderr)
    return EXIT_OK if ok else EXIT_VIOLATIONS


def cmd_verify(args: argparse.Namespace, cfg: SystemConfig) -> int:
    task_set = load_task_set(args.tasks, args.profiles)
    solutions = _load_solutions(args.solution)
    if not solutions:
        raise DocumentError(f"{args.solution}: front holds no solutions")
    return _report([verify_solution(s, task_set, cfg, strict=args.strict) for s in solutions])


def cmd_import_solution(args: argparse.Namespace, cfg: SystemConfig) -> int:
    task_set = load_task_set(args.tasks, args.profiles)
    solution, verdict = import_solver_solution(args.solution, task_set, cfg, strict=args.strict)
    if solution is not None and args.out is not None:
        write_json(solution, args.out)
    return _report([verdict])


def cmd_synth_profiles(args: argparse.Namespace, cfg: SystemConfig) -> int:
    profiles = synthetic_profiles(
        args.count, cfg.B, cfg.K, args.seed, prefix=args.prefix,
        unavailable_probability=args.unavailable_probability,
    )
    args.out.mkdir(parents=True, exist_ok=True)
    paths = [write_profile(profile, args.out) for profile in profiles]
    _emit({"profiles": [str(p) for p in paths]}, None)
    return EXIT_OK


def cmd_plot(args: argparse.Namespace, cfg: SystemConfig) -> int:
    if args.summary is None and args.front is None:
        raise UsageError("plot needs --summary and/or --front")
    paths: List[Path] = []
    if args.summary is not None:
        paths.extend(plot_summary(load_model(args.summary, MetricsTable), args.out, args.format))
    if args.front is not None:
        front = load_model(args.front, SolutionFront)
        paths.append(save_figure(front_figure(front), args.out / f"front.{args.format}"))
    _emit({"plots": [str(p) for p in paths]}, None)
    return EXIT_OK


def cmd_schema(args: argparse.Namespace, cfg: SystemConfig) -> int:
    schemas = {name: model.model_json_schema() for name, model in SCHEMAS.items()}
    _emit(schemas, args.out)
    return EXIT_OK


COMMANDS: Dict[str, Callable[[argparse.Namespace, SystemConfig], int]] = {
    "solve": cmd_solve,
    "oracle": cmd_oracle,
    "generate": cmd_generate,
    "evaluate": cmd_evaluate,
    "export-ilp": cmd_export_ilp,
    "verify": cmd_verify,
    "import-solution": cmd_import_solution,
    "synth-profiles": cmd_synth_profiles,
    "plot": cmd_plot,
    "schema": cmd_schema,
}


def _configure_logging(level: Optional[str]) -> None:
    level = (level or settings.log_level).upper()
    logging.basicConfig(level=level, format=LOG_FORMAT, stream=sys.stderr)
    logging.getLogger().setLevel(level)


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Run one subcommand and return its exit code."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError:
        return EXIT_ERROR
    except SystemExit as e:
        # --help
        return EXIT_OK if e.code in (0, None) else EXIT_ERROR

    try:
        _configure_logging(args.log_level)
        cfg = resolve_config(args)
        return COMMANDS[args.command](args, cfg)
    except CoallocError as e:
        logger.error(f"{args.command} failed: {e}")
        print(f"error: {e}", file=sys.stderr)
        return EXIT_ERROR
    except (OSError, ValueError) as e:
        logger.error(f"{args.command} failed: {e}")
        print(f"error: {e}", file=sys.stderr)
        return EXIT_ERROR
    except Exception as e:
        logger.error(f"Unexpected error in {args.command}: {e}", exc_info=True)
        print(f"error: {e}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
