"""Preflight planning for heterogeneous UAV fleets in voxelized airspace.

Missions are roundtrips (hub, delivery, on-site dwell, hub) planned on a
26-connected voxel grid under timed no-fly zones. A safe-interval
single-agent search treats other vehicles' trajectories as soft, penalized
constraints; the fleet solver plans in urgency order and repairs residual
separation conflicts by replanning neighborhoods picked off a geometric
collision graph. An independent sampling validator and a benchmark
harness round out the package.
"""

from .errors import ContractError, PlanTimeout, PreflightError, ScenarioError
from .geometry import (
    CollisionGraph,
    ConflictRecord,
    MotionSegment,
    PackedPaths,
    classify_conflict,
    count_conflicts,
    geo_conflict,
    min_separation,
    segments_conflict,
)
from .grid import GridMap, Voxel, move_distance
from .intervals import NoFlyZone, SafeInterval, SafeIntervalTable, build_sfi_table
from .model import SolveResult, SolverParams, Trajectory, UavProfile
from .planner import SearchNode, SearchStats, backtrack_path, direction_sector, heuristic, plan, pruned_neighbors
from .scenario import (
    Scenario,
    build_city_fleet,
    export_solution,
    generate_scenario,
    load_city_map,
    load_scenario,
    load_solution,
    save_scenario,
)
from .solver import conflict_neighborhood, plan_round_trip, solve, solve_pp_baseline, sort_by_urgency
from .validate import ValidationReport, flowtime, validate_solution

__version__ = "0.1.0"

__all__ = [
    "ContractError",
    "PlanTimeout",
    "PreflightError",
    "ScenarioError",
    "CollisionGraph",
    "ConflictRecord",
    "MotionSegment",
    "PackedPaths",
    "classify_conflict",
    "count_conflicts",
    "geo_conflict",
    "min_separation",
    "segments_conflict",
    "GridMap",
    "Voxel",
    "move_distance",
    "NoFlyZone",
    "SafeInterval",
    "SafeIntervalTable",
    "build_sfi_table",
    "SolveResult",
    "SolverParams",
    "Trajectory",
    "UavProfile",
    "SearchNode",
    "SearchStats",
    "backtrack_path",
    "direction_sector",
    "heuristic",
    "plan",
    "pruned_neighbors",
    "Scenario",
    "build_city_fleet",
    "export_solution",
    "generate_scenario",
    "load_city_map",
    "load_scenario",
    "load_solution",
    "save_scenario",
    "conflict_neighborhood",
    "plan_round_trip",
    "solve",
    "solve_pp_baseline",
    "sort_by_urgency",
    "ValidationReport",
    "flowtime",
    "validate_solution",
    "__version__",
]
