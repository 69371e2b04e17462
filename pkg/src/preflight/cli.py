"""Command-line front end: generate, solve, validate, bench.

Relative output paths resolve against $PREFLIGHT_OUT_DIR when it is set.
Exit codes: 0 success, 1 solver failure or validation violations,
2 usage or input errors.
"""

from __future__ import annotations

import argparse
import dataclasses
import os
import sys

from .bench import format_summary, load_suite, read_rows, run_suite, summarize
from .errors import PreflightError
from .scenario import (
    export_solution,
    generate_scenario,
    load_scenario,
    load_solution,
    save_scenario,
)
from .solver import solve, solve_pp_baseline
from .validate import validate_solution


def _out_path(path: str) -> str:
    base = os.environ.get("PREFLIGHT_OUT_DIR")
    if base and not os.path.isabs(path):
        os.makedirs(base, exist_ok=True)
        return os.path.join(base, path)
    return path


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="preflight",
        description="Preflight planning for UAV fleets: scenario generation, solving, validation, benchmarks.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("generate", help="generate a seeded scenario file")
    gen.add_argument("--dims", type=int, nargs=3, metavar=("X", "Y", "Z"), required=True)
    gen.add_argument("--density", type=float, default=0.05, help="obstacle fraction of total volume")
    gen.add_argument("--agents", type=int, required=True)
    gen.add_argument("--nfzs", type=int, default=0)
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--gamma", type=float, default=0.5)
    gen.add_argument("--wait", type=float, default=10.0)
    gen.add_argument("--neighborhood", type=int, default=10)
    gen.add_argument("--time-limit", type=float, default=300.0)
    gen.add_argument("--out", required=True, help="scenario JSON path")

    sol = sub.add_parser("solve", help="solve a scenario and write the solution")
    sol.add_argument("scenario", help="scenario JSON path")
    sol.add_argument("--solver", choices=("dtapp", "pp"), default="dtapp")
    sol.add_argument("--no-pruning", action="store_true", help="expand all 26 neighbors")
    sol.add_argument("--seed", type=int, default=None, help="override the scenario seed")
    sol.add_argument("--time-limit", type=float, default=None)
    sol.add_argument("--gamma", type=float, default=None)
    sol.add_argument("--neighborhood", type=int, default=None)
    sol.add_argument("--out", required=True, help="solution JSON path")

    val = sub.add_parser("validate", help="check a solution against its scenario")
    val.add_argument("scenario", help="scenario JSON path")
    val.add_argument("solution", help="solution JSON path")
    val.add_argument("--dt", type=float, default=0.01, help="sampling resolution in seconds")
    val.add_argument("--report", default=None, help="write the full report JSON here")

    ben = sub.add_parser("bench", help="run a benchmark suite and append CSV rows")
    ben.add_argument("suite", nargs="?", help="suite config JSON path")
    ben.add_argument("--out", default="bench.csv", help="CSV path (appended)")
    ben.add_argument("--jobs", type=int, default=1, help="parallel solver processes")
    ben.add_argument("--summarize-only", metavar="CSV", default=None,
                     help="skip running; aggregate an existing CSV")
    ben.add_argument("--time-limit", type=float, default=None,
                     help="limit substituted for unsolved runs when summarizing")
    return parser


def _cmd_generate(args: argparse.Namespace) -> int:
    scenario = generate_scenario(
        tuple(args.dims), args.density, args.agents, args.nfzs, args.seed,
        gamma=args.gamma, wait=args.wait, neighborhood=args.neighborhood,
        time_limit=args.time_limit,
    )
    out = _out_path(args.out)
    save_scenario(scenario, out)
    print(f"wrote {out}: dims {scenario.grid.dims}, "
          f"{len(scenario.grid.hard_obstacles)} obstacles, "
          f"{len(scenario.fleet)} agents, {len(scenario.nfzs)} zones")
    return 0


def _cmd_solve(args: argparse.Namespace) -> int:
    scenario = load_scenario(args.scenario)
    overrides = {}
    if args.no_pruning:
        overrides["pruning"] = False
    if args.seed is not None:
        overrides["seed"] = args.seed
    if args.time_limit is not None:
        overrides["time_limit"] = args.time_limit
    if args.gamma is not None:
        overrides["gamma"] = args.gamma
    if args.neighborhood is not None:
        overrides["neighborhood"] = args.neighborhood
    if args.solver == "pp":
        overrides["soft_mode"] = "hard"
    if overrides:
        scenario = dataclasses.replace(
            scenario, params=dataclasses.replace(scenario.params, **overrides)
        )
    runner = solve_pp_baseline if args.solver == "pp" else solve
    result = runner(scenario)
    out = _out_path(args.out)
    export_solution(result, out)
    print(
        f"{args.solver}: {result.status} in {result.wall_time:.2f}s, "
        f"flowtime {result.flowtime:.1f}s, {result.iterations} repair iterations, "
        f"{result.expanded_nodes} expansions -> {out}"
    )
    return 0 if result.success else 1


def _cmd_validate(args: argparse.Namespace) -> int:
    scenario = load_scenario(args.scenario)
    _, trajectories = load_solution(args.solution)
    report = validate_solution(scenario, trajectories, dt=args.dt)
    if args.report:
        report.save(_out_path(args.report))
    counts = report.counts()
    print(
        f"validation {'OK' if report.ok else 'FAILED'}: "
        f"{counts['nfz']} zone, {counts['separation']} separation, "
        f"{counts['structural']} structural violations at dt={args.dt}"
    )
    return 0 if report.ok else 1


def _cmd_bench(args: argparse.Namespace) -> int:
    if args.summarize_only:
        rows = read_rows(args.summarize_only)
        print(format_summary(summarize(rows, time_limit=args.time_limit)))
        return 0
    if not args.suite:
        print("error: a suite config is required unless --summarize-only is used", file=sys.stderr)
        return 2
    specs = load_suite(args.suite)
    out = _out_path(args.out)
    rows = run_suite(
        specs, csv_path=out, jobs=args.jobs,
        on_row=lambda row: print(
            f"{row['scenario_id']} {row['solver']} prune={row['pruning']}: "
            f"{row['status']} wall={row['wall_time']}s conflicts={row['final_conflicts']}"
        ),
    )
    limit = args.time_limit if args.time_limit is not None else specs[0].time_limit if specs else None
    print(f"\n{len(rows)} runs appended to {out}")
    print(format_summary(summarize(rows, time_limit=limit)))
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    handlers = {
        "generate": _cmd_generate,
        "solve": _cmd_solve,
        "validate": _cmd_validate,
        "bench": _cmd_bench,
    }
    try:
        return handlers[args.command](args)
    except PreflightError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
