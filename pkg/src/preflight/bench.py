"""Benchmark harness: seeded scenario sweeps, CSV metrics, aggregation.

A suite config is a JSON object listing agent counts, obstacle densities,
zone counts, seeds, solver variants, and pruning settings; every
combination becomes one run and one CSV row. Rows are reproducible
across machines except for the wall-time column; expanded-node counts
are the hardware-neutral cost signal.
"""

from __future__ import annotations

import csv
import json
import statistics
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import IO, Any, Callable, Iterable

from .errors import ScenarioError
from .scenario import generate_scenario
from .solver import solve, solve_pp_baseline

CSV_COLUMNS = [
    "scenario_id",
    "solver",
    "pruning",
    "agents",
    "density",
    "nfz_count",
    "seed",
    "status",
    "wall_time",
    "flowtime",
    "iterations",
    "expanded_nodes",
    "final_conflicts",
]

SOLVERS = {"dtapp": solve, "pp": solve_pp_baseline}


@dataclass(frozen=True)
class RunSpec:
    dims: tuple[int, int, int]
    density: float
    agents: int
    nfz_count: int
    seed: int
    solver: str
    pruning: bool
    time_limit: float
    gamma: float
    neighborhood: int
    wait: float

    @property
    def scenario_id(self) -> str:
        d = "x".join(str(c) for c in self.dims)
        return f"{d}_d{self.density}_a{self.agents}_n{self.nfz_count}_s{self.seed}"


def load_suite(source: str | IO[str]) -> list[RunSpec]:
    """Expand a suite config file into the full list of runs."""
    if hasattr(source, "read"):
        doc = json.load(source)
    else:
        with open(source) as fh:
            doc = json.load(fh)
    try:
        dims = tuple(doc["dims"])
        specs = [
            RunSpec(
                dims=dims,
                density=density,
                agents=agents,
                nfz_count=nfz,
                seed=seed,
                solver=solver,
                pruning=pruning,
                time_limit=float(doc.get("time_limit", 300.0)),
                gamma=float(doc.get("gamma", 0.5)),
                neighborhood=int(doc.get("neighborhood", 10)),
                wait=float(doc.get("wait", 10.0)),
            )
            for density in doc["densities"]
            for agents in doc["agent_counts"]
            for nfz in doc["nfz_counts"]
            for seed in doc["seeds"]
            for solver in doc.get("solvers", ["dtapp"])
            for pruning in doc.get("pruning", [True])
        ]
    except KeyError as exc:
        raise ScenarioError(f"suite config is missing field {exc}") from None
    for spec in specs:
        if spec.solver not in SOLVERS:
            raise ScenarioError(f"unknown solver {spec.solver!r} in suite config")
    return specs


def execute_run(spec: RunSpec) -> dict[str, Any]:
    """Generate the scenario for one spec, solve it, and build its CSV row."""
    scenario = generate_scenario(
        spec.dims, spec.density, spec.agents, spec.nfz_count, spec.seed,
        gamma=spec.gamma, wait=spec.wait, neighborhood=spec.neighborhood,
        time_limit=spec.time_limit, pruning=spec.pruning,
    )
    result = SOLVERS[spec.solver](scenario)
    return {
        "scenario_id": spec.scenario_id,
        "solver": spec.solver,
        "pruning": int(spec.pruning),
        "agents": spec.agents,
        "density": spec.density,
        "nfz_count": spec.nfz_count,
        "seed": spec.seed,
        "status": result.status,
        "wall_time": round(result.wall_time, 3),
        "flowtime": round(result.flowtime, 3),
        "iterations": result.iterations,
        "expanded_nodes": result.expanded_nodes,
        "final_conflicts": result.conflict_history[-1] if result.conflict_history else 0,
    }


def append_rows(rows: Iterable[dict], csv_path: str) -> None:
    """Append rows, writing the header only when the file is new or empty."""
    try:
        with open(csv_path) as fh:
            has_header = bool(fh.readline().strip())
    except FileNotFoundError:
        has_header = False
    with open(csv_path, "a", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=CSV_COLUMNS)
        if not has_header:
            writer.writeheader()
        for row in rows:
            writer.writerow(row)


def run_suite(
    specs: list[RunSpec],
    csv_path: str | None = None,
    jobs: int = 1,
    on_row: Callable[[dict], None] | None = None,
) -> list[dict]:
    """Execute a suite, optionally in parallel; rows come back in spec order."""
    if jobs <= 1:
        rows = []
        for spec in specs:
            row = execute_run(spec)
            rows.append(row)
            if on_row:
                on_row(row)
    else:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(execute_run, specs))
        if on_row:
            for row in rows:
                on_row(row)
    if csv_path:
        append_rows(rows, csv_path)
    return rows


def read_rows(csv_path: str) -> list[dict]:
    with open(csv_path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None:
            return []
        missing = set(CSV_COLUMNS) - set(reader.fieldnames)
        if missing:
            raise ScenarioError(f"benchmark CSV is missing columns: {sorted(missing)}")
        return list(reader)


def summarize(rows: Iterable[dict], time_limit: float | None = None) -> list[dict]:
    """Aggregate rows per (solver, pruning, agents, density, nfz_count).

    Unsolved runs enter the runtime mean at the time limit when one is
    given, otherwise at their recorded wall time; flowtime averages cover
    successful runs only.
    """
    groups: dict[tuple, list[dict]] = {}
    for row in rows:
        key = (row["solver"], str(row["pruning"]), str(row["agents"]),
               str(row["density"]), str(row["nfz_count"]))
        groups.setdefault(key, []).append(row)
    out = []
    for key in sorted(groups):
        members = groups[key]
        runtimes = []
        flowtimes = []
        successes = 0
        for row in members:
            ok = row["status"] == "success"
            successes += ok
            wall = float(row["wall_time"])
            if not ok and time_limit is not None:
                wall = time_limit
            runtimes.append(wall)
            if ok:
                flowtimes.append(float(row["flowtime"]))
        out.append(
            {
                "solver": key[0],
                "pruning": key[1],
                "agents": key[2],
                "density": key[3],
                "nfz_count": key[4],
                "runs": len(members),
                "success_rate": 100.0 * successes / len(members),
                "runtime_mean": statistics.fmean(runtimes),
                "runtime_std": statistics.pstdev(runtimes) if len(runtimes) > 1 else 0.0,
                "flowtime_mean": statistics.fmean(flowtimes) if flowtimes else float("nan"),
            }
        )
    return out


def format_summary(summary: list[dict]) -> str:
    header = (
        f"{'solver':<8} {'prune':<5} {'agents':>6} {'density':>7} {'nfz':>3} "
        f"{'runs':>4} {'success%':>8} {'runtime(s)':>16} {'flowtime':>10}"
    )
    lines = [header, "-" * len(header)]
    for row in summary:
        rt = f"{row['runtime_mean']:.2f} +/- {row['runtime_std']:.2f}"
        lines.append(
            f"{row['solver']:<8} {row['pruning']:<5} {row['agents']:>6} "
            f"{row['density']:>7} {row['nfz_count']:>3} {row['runs']:>4} "
            f"{row['success_rate']:>8.1f} {rt:>16} {row['flowtime_mean']:>10.1f}"
        )
    return "\n".join(lines)
