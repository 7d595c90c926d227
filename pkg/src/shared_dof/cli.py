"""Command line entry points: run one session, benchmark variants, serve.

Exit codes: 0 success, 1 bad usage or failed validation, 2 session hit
the tick budget before finishing the task.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

from .control import VARIANTS, ControllerConfig
from .errors import SharedDofError
from .runner import DEFAULT_MAX_TICKS, run_headless
from .scene import Scenario, builtin_scenario, list_builtin_scenarios, load_scenario
from .simuser import POLICIES, UserPolicy
from .telemetry import (
    aggregate_csv,
    metrics_csv,
    summarize,
    text_report,
    write_jsonl,
)

LOG_DIR_ENV = "SHARED_DOF_LOG_DIR"


class _Parser(argparse.ArgumentParser):
    # argparse exits 2 on usage errors; keep 2 reserved for timeouts
    def error(self, message):
        self.print_usage(sys.stderr)
        raise SystemExit(f"{self.prog}: error: {message}")


def _build_parser() -> _Parser:
    from . import __version__

    parser = _Parser(prog="shared-dof",
                     description="shared-control end effector simulator")
    parser.add_argument("--version", action="version",
                        version=f"shared-dof {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="run one headless session")
    run_p.add_argument("--scenario", default="canonical",
                       help="builtin scenario name or path to a JSON file")
    run_p.add_argument("--variant", default="classic", choices=VARIANTS)
    run_p.add_argument("--policy", default="greedy", choices=POLICIES)
    run_p.add_argument("--seed", type=int, default=None,
                       help="RNG seed (defaults to the scenario seed)")
    run_p.add_argument("--max-ticks", type=int, default=DEFAULT_MAX_TICKS)
    run_p.add_argument("--out", default=None,
                       help="JSONL output path; metrics CSV lands next to it")

    bench_p = sub.add_parser("bench", help="benchmark variants over seeds")
    bench_p.add_argument("--scenario", default="canonical")
    bench_p.add_argument("--mode", default="all",
                         help="comma list of variants, or 'all'")
    bench_p.add_argument("--policy", default="greedy", choices=POLICIES)
    bench_p.add_argument("--seed", default="1-10",
                         help="comma list and/or ranges, e.g. '1-5,8'")
    bench_p.add_argument("--max-ticks", type=int, default=DEFAULT_MAX_TICKS)
    bench_p.add_argument("--out", default=None,
                         help="aggregate CSV path (default benchmark.csv)")
    bench_p.add_argument("--per-run", default=None,
                         help="optional per-run metrics CSV path")

    serve_p = sub.add_parser("serve", help="serve the WebSocket session API")
    serve_p.add_argument("--host", default="127.0.0.1")
    serve_p.add_argument("--port", type=int, default=8731)
    serve_p.add_argument("--tick-rate", type=float, default=20.0,
                         help="wall-clock ticks per second")
    serve_p.add_argument("--scenario", action="append", default=[],
                         help="extra scenario JSON file (repeatable)")
    return parser


def _resolve_scenario(spec: str) -> Scenario:
    path = Path(spec)
    if path.exists():
        return load_scenario(path)
    try:
        return builtin_scenario(spec)
    except SharedDofError:
        known = ", ".join(list_builtin_scenarios())
        raise SharedDofError(
            f"no scenario file at {spec!r} and no builtin of that name "
            f"(builtins: {known})")


def _out_path(raw: str | None, default_name: str) -> Path:
    base = Path(os.environ.get(LOG_DIR_ENV, "."))
    if raw is None:
        return base / default_name
    path = Path(raw)
    return path if path.is_absolute() else base / path


def _parse_seeds(spec: str) -> list:
    seeds = []
    for part in spec.split(","):
        part = part.strip()
        if not part:
            continue
        if "-" in part[1:]:  # allow a leading minus on single values
            lo, hi = part.split("-", 1) if not part.startswith("-") else (None, None)
            if lo is None:
                raise SharedDofError(f"bad seed range {part!r}")
            lo_i, hi_i = int(lo), int(hi)
            if hi_i < lo_i:
                raise SharedDofError(f"empty seed range {part!r}")
            seeds.extend(range(lo_i, hi_i + 1))
        else:
            seeds.append(int(part))
    if not seeds:
        raise SharedDofError(f"no seeds in {spec!r}")
    return seeds


def _parse_modes(spec: str) -> list:
    if spec.strip() == "all":
        return list(VARIANTS)
    modes = [m.strip() for m in spec.split(",") if m.strip()]
    for m in modes:
        if m not in VARIANTS:
            raise SharedDofError(
                f"unknown variant {m!r} (choose from {', '.join(VARIANTS)})")
    if not modes:
        raise SharedDofError("no variants selected")
    return modes


def _cmd_run(args) -> int:
    scenario = _resolve_scenario(args.scenario)
    config = ControllerConfig(variant=args.variant)
    policy = UserPolicy(kind=args.policy)
    result = run_headless(scenario, config, policy=policy, seed=args.seed,
                          max_ticks=args.max_ticks)
    seed = result.metrics.seed
    default = f"{scenario.name}_{args.variant}_{args.policy}_{seed}.jsonl"
    out = _out_path(args.out, default)
    write_jsonl(out, result.records)
    csv_path = out.with_suffix(".metrics.csv")
    csv_path.write_text(metrics_csv([result.metrics]), encoding="utf-8")
    m = result.metrics
    status = "done" if m.success else "timeout"
    print(f"{status} variant={m.variant} seed={m.seed} "
          f"time={m.completion_time_s}s switches={m.user_switches}"
          f"+{m.auto_switches}auto -> {out}")
    return 0 if m.success else 2


def _cmd_bench(args) -> int:
    scenario = _resolve_scenario(args.scenario)
    modes = _parse_modes(args.mode)
    seeds = _parse_seeds(args.seed)
    runs = []
    for variant in modes:
        config = ControllerConfig(variant=variant)
        for seed in seeds:
            policy = UserPolicy(kind=args.policy)
            result = run_headless(scenario, config, policy=policy, seed=seed,
                                  max_ticks=args.max_ticks,
                                  keep_records=False)
            runs.append(result.metrics)
    summaries = summarize(runs)
    out = _out_path(args.out, "benchmark.csv")
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(aggregate_csv(summaries), encoding="utf-8")
    if args.per_run:
        per_run = _out_path(args.per_run, "benchmark_runs.csv")
        per_run.parent.mkdir(parents=True, exist_ok=True)
        per_run.write_text(metrics_csv(runs), encoding="utf-8")
    sys.stdout.write(text_report(summaries))
    print(f"aggregate -> {out}")
    return 0


def _cmd_serve(args) -> int:
    import uvicorn

    from .server import create_app

    app = create_app(default_tick_rate=args.tick_rate,
                     scenario_paths=[Path(p) for p in args.scenario])
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return 0


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command == "run":
            return _cmd_run(args)
        if args.command == "bench":
            return _cmd_bench(args)
        return _cmd_serve(args)
    except SystemExit as exc:
        if isinstance(exc.code, str):
            print(exc.code, file=sys.stderr)
            return 1
        raise
    except (SharedDofError, ValueError, OSError) as exc:
        print(f"shared-dof: error: {exc}", file=sys.stderr)
        return 1
