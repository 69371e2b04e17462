"""Scenario generation and JSON serialization of scenarios, city maps, and solutions.

All formats are versioned JSON (see docs/formats.md). Generation draws
from one seeded generator in a fixed, documented order (obstacles, then fleet,
then no-fly zones), so a (arguments, seed) pair always yields the
same scenario bytes. The JSON files, not the generator stream, are the
cross-implementation contract.
"""

from __future__ import annotations

import json
import math
import random
import warnings
from dataclasses import asdict, dataclass
from typing import IO, Any

from .errors import ScenarioError
from .grid import GridMap, Voxel
from .intervals import NoFlyZone
from .model import SolveResult, SolverParams, Trajectory, UavProfile

SCENARIO_FORMAT = "preflight.scenario/1"
CITYMAP_FORMAT = "preflight.citymap/1"
SOLUTION_FORMAT = "preflight.solution/1"

OBSTACLE_TOP_LEVEL = 3  # ground clutter occupies levels 0..3
OPEN_AIRSPACE_LEVEL = 4  # zones are generated at this level and above
CITY_NFZ_MIN_LEVEL = 12

_NFZ_WINDOW = (100.0, 500.0)
_NFZ_MIN_DURATION = 5.0
_NFZ_VOLUME_RANGE = (0.02, 0.05)  # fraction of open airspace per generated zone
_T_INIT_RANGE = (1.0, 1000.0)
_RADIUS_RANGE = (0.5, 2.0)
_SPEED_RANGE = (1.0, 5.0)


class LowAltitudeNfzWarning(UserWarning):
    """A city-map zone reaches below the customary restricted-airspace floor."""


@dataclass(frozen=True)
class Scenario:
    """A complete problem instance: world, fleet, and solver parameters."""

    grid: GridMap
    nfzs: tuple[NoFlyZone, ...]
    fleet: tuple[UavProfile, ...]
    params: SolverParams

    def __post_init__(self) -> None:
        ids = [p.id for p in self.fleet]
        if len(set(ids)) != len(ids):
            raise ScenarioError("fleet ids must be unique")
        for p in self.fleet:
            for label, v in (("hub", p.hub), ("delivery", p.delivery)):
                if not self.grid.in_bounds(v):
                    raise ScenarioError(f"uav {p.id}: {label} {v} is out of bounds")
                if self.grid.is_hard_blocked(v):
                    raise ScenarioError(f"uav {p.id}: {label} {v} is inside an obstacle")
        for nfz in self.nfzs:
            for v in nfz.region:
                if not self.grid.in_bounds(v):
                    raise ScenarioError(f"no-fly zone voxel {v} is out of bounds")


def _sample_nfz_box(
    rng: random.Random, dims: tuple[int, int, int], z_lo: int
) -> tuple[int, int, int, int, int, int]:
    """Axis-aligned box in the open layers covering 2-5% of their volume."""
    dx, dy, dz = dims
    z_levels = dz - z_lo
    open_volume = dx * dy * z_levels
    lo, hi = _NFZ_VOLUME_RANGE
    for _ in range(200):
        lx = rng.randint(1, dx)
        ly = rng.randint(1, dy)
        lz = rng.randint(1, z_levels)
        frac = (lx * ly * lz) / open_volume
        if lo <= frac <= hi:
            break
    else:
        lz = min(2, z_levels)
        area = max(1, math.ceil(0.03 * open_volume / lz))
        ly = min(dy, max(1, math.ceil(math.sqrt(area))))
        lx = min(dx, max(1, math.ceil(area / ly)))
    x0 = rng.randint(0, dx - lx)
    y0 = rng.randint(0, dy - ly)
    z0 = rng.randint(z_lo, dz - lz)
    return x0, y0, z0, lx, ly, lz


def generate_scenario(
    dims: tuple[int, int, int],
    obstacle_density: float,
    n_agents: int,
    n_nfzs: int,
    seed: int,
    **param_overrides: Any,
) -> Scenario:
    """Sample a Monte-Carlo instance.

    Obstacles fill exactly floor(density * volume) voxels of the ground
    levels (0..3); hubs and deliveries are uniform over free voxels; start
    times, radii and speeds are uniform over [1,1000] s, [0.5,2] m and
    [1,5] m/s; zones are boxes in the open layers with activity windows
    inside [100,500] s. Raises ScenarioError when the ground levels cannot
    hold the requested obstacle count.
    """
    if not (0 <= obstacle_density < 1):
        raise ScenarioError("obstacle density must be in [0, 1)")
    if n_agents < 0 or n_nfzs < 0:
        raise ScenarioError("agent and zone counts must be non-negative")
    grid_probe = GridMap(tuple(dims))
    dx, dy, dz = grid_probe.dims
    rng = random.Random(seed)

    n_obstacles = int(obstacle_density * grid_probe.volume)
    ground = [
        (x, y, z)
        for x in range(dx)
        for y in range(dy)
        for z in range(min(OBSTACLE_TOP_LEVEL + 1, dz))
    ]
    if n_obstacles > len(ground):
        raise ScenarioError(
            f"density {obstacle_density} needs {n_obstacles} obstacle voxels "
            f"but the ground levels hold only {len(ground)}"
        )
    obstacles = frozenset(rng.sample(ground, n_obstacles))
    grid = GridMap(grid_probe.dims, obstacles)

    free = [
        (x, y, z)
        for x in range(dx)
        for y in range(dy)
        for z in range(dz)
        if (x, y, z) not in obstacles
    ]
    if n_agents > 0 and len(free) < 2:
        raise ScenarioError("not enough free voxels to place the fleet")
    fleet = []
    for i in range(n_agents):
        hub = rng.choice(free)
        delivery = rng.choice(free)
        while delivery == hub:
            delivery = rng.choice(free)
        t_init = rng.uniform(*_T_INIT_RANGE)
        radius = rng.uniform(*_RADIUS_RANGE)
        speed = rng.uniform(*_SPEED_RANGE)
        fleet.append(
            UavProfile(
                id=f"u{i:04d}", hub=hub, delivery=delivery,
                t_init=t_init, speed=speed, radius=radius,
            )
        )

    z_lo = min(OPEN_AIRSPACE_LEVEL, dz - 1)
    nfzs = []
    for _ in range(n_nfzs):
        x0, y0, z0, lx, ly, lz = _sample_nfz_box(rng, grid.dims, z_lo)
        t_start = rng.uniform(_NFZ_WINDOW[0], _NFZ_WINDOW[1] - 4 * _NFZ_MIN_DURATION)
        t_end = rng.uniform(t_start + _NFZ_MIN_DURATION, _NFZ_WINDOW[1])
        region = frozenset(
            (x, y, z)
            for x in range(x0, x0 + lx)
            for y in range(y0, y0 + ly)
            for z in range(z0, z0 + lz)
        )
        nfzs.append(NoFlyZone(region, t_start, t_end))

    params = SolverParams(seed=seed, **param_overrides)
    return Scenario(grid, tuple(nfzs), tuple(fleet), params)


# --------------------------------------------------------------------------
# JSON plumbing


def _open_sink(sink: str | IO[str], mode: str):
    if hasattr(sink, "write") or hasattr(sink, "read"):
        return sink, False
    return open(sink, mode), True


def _dump(obj: dict, sink: str | IO[str]) -> None:
    fh, owned = _open_sink(sink, "w")
    try:
        json.dump(obj, fh, indent=1)
        fh.write("\n")
    finally:
        if owned:
            fh.close()


def _load_json(source: str | IO[str]) -> Any:
    fh, owned = _open_sink(source, "r")
    try:
        try:
            return json.load(fh)
        except json.JSONDecodeError as exc:
            raise ScenarioError(f"not valid JSON: {exc}") from None
    finally:
        if owned:
            fh.close()


def _req(obj: dict, key: str, path: str) -> Any:
    if not isinstance(obj, dict) or key not in obj:
        raise ScenarioError(f"{path}: missing required field '{key}'")
    return obj[key]


def _as_voxel(item: Any, path: str) -> Voxel:
    if (
        not isinstance(item, (list, tuple))
        or len(item) != 3
        or not all(isinstance(c, int) and c >= 0 for c in item)
    ):
        raise ScenarioError(f"{path}: expected a voxel [x, y, z] of non-negative integers")
    return (item[0], item[1], item[2])


def _region_to_json(region: frozenset[Voxel]) -> dict:
    xs = [v[0] for v in region]
    ys = [v[1] for v in region]
    zs = [v[2] for v in region]
    lo = (min(xs), min(ys), min(zs))
    hi = (max(xs), max(ys), max(zs))
    if (hi[0] - lo[0] + 1) * (hi[1] - lo[1] + 1) * (hi[2] - lo[2] + 1) == len(region):
        return {"box": [list(lo), list(hi)]}
    return {"voxels": [list(v) for v in sorted(region)]}


def _region_from_json(obj: dict, path: str) -> frozenset[Voxel]:
    if "box" in obj:
        box = obj["box"]
        if not isinstance(box, list) or len(box) != 2:
            raise ScenarioError(f"{path}.box: expected [[x0,y0,z0], [x1,y1,z1]]")
        lo = _as_voxel(box[0], f"{path}.box[0]")
        hi = _as_voxel(box[1], f"{path}.box[1]")
        if any(h < l for l, h in zip(lo, hi)):
            raise ScenarioError(f"{path}.box: corners are not ordered lo <= hi")
        return frozenset(
            (x, y, z)
            for x in range(lo[0], hi[0] + 1)
            for y in range(lo[1], hi[1] + 1)
            for z in range(lo[2], hi[2] + 1)
        )
    if "voxels" in obj:
        voxels = obj["voxels"]
        if not isinstance(voxels, list) or not voxels:
            raise ScenarioError(f"{path}.voxels: expected a non-empty list")
        return frozenset(_as_voxel(v, f"{path}.voxels[{i}]") for i, v in enumerate(voxels))
    raise ScenarioError(f"{path}: region needs either 'box' or 'voxels'")


def _nfz_from_json(obj: dict, path: str) -> NoFlyZone:
    region = _region_from_json(_req(obj, "region", path), f"{path}.region")
    t_start = _req(obj, "t_start", path)
    t_end = _req(obj, "t_end", path)
    if not isinstance(t_start, (int, float)) or not isinstance(t_end, (int, float)):
        raise ScenarioError(f"{path}: t_start/t_end must be numbers")
    if t_end <= t_start:
        raise ScenarioError(f"{path}: t_end ({t_end}) must be greater than t_start ({t_start})")
    try:
        return NoFlyZone(region, float(t_start), float(t_end))
    except ScenarioError as exc:
        raise ScenarioError(f"{path}: {exc}") from None


def save_scenario(scenario: Scenario, sink: str | IO[str]) -> None:
    """Write a scenario as canonical versioned JSON (load round-trips it)."""
    doc = {
        "format": SCENARIO_FORMAT,
        "grid": {
            "dims": list(scenario.grid.dims),
            "obstacles": [list(v) for v in sorted(scenario.grid.hard_obstacles)],
        },
        "nfzs": [
            {"region": _region_to_json(z.region), "t_start": z.t_start, "t_end": z.t_end}
            for z in scenario.nfzs
        ],
        "fleet": [
            {
                "id": p.id,
                "hub": list(p.hub),
                "delivery": list(p.delivery),
                "t_init": p.t_init,
                "speed": p.speed,
                "radius": p.radius,
            }
            for p in scenario.fleet
        ],
        "params": asdict(scenario.params),
    }
    _dump(doc, sink)


def load_scenario(source: str | IO[str]) -> Scenario:
    """Parse a scenario file; errors carry the offending JSON path."""
    doc = _load_json(source)
    fmt = _req(doc, "format", "$")
    if fmt != SCENARIO_FORMAT:
        raise ScenarioError(f"$.format: expected {SCENARIO_FORMAT!r}, got {fmt!r}")
    grid_doc = _req(doc, "grid", "$")
    dims_raw = _req(grid_doc, "dims", "$.grid")
    if not isinstance(dims_raw, list) or len(dims_raw) != 3:
        raise ScenarioError("$.grid.dims: expected [dx, dy, dz]")
    obstacles = frozenset(
        _as_voxel(v, f"$.grid.obstacles[{i}]")
        for i, v in enumerate(_req(grid_doc, "obstacles", "$.grid"))
    )
    try:
        grid = GridMap(tuple(dims_raw), obstacles)
    except ScenarioError as exc:
        raise ScenarioError(f"$.grid: {exc}") from None
    nfzs = tuple(
        _nfz_from_json(z, f"$.nfzs[{i}]") for i, z in enumerate(_req(doc, "nfzs", "$"))
    )
    fleet = []
    for i, p in enumerate(_req(doc, "fleet", "$")):
        path = f"$.fleet[{i}]"
        try:
            fleet.append(
                UavProfile(
                    id=str(_req(p, "id", path)),
                    hub=_as_voxel(_req(p, "hub", path), f"{path}.hub"),
                    delivery=_as_voxel(_req(p, "delivery", path), f"{path}.delivery"),
                    t_init=float(_req(p, "t_init", path)),
                    speed=float(_req(p, "speed", path)),
                    radius=float(_req(p, "radius", path)),
                )
            )
        except ScenarioError as exc:
            raise ScenarioError(f"{path}: {exc}") from None
    params_doc = _req(doc, "params", "$")
    try:
        params = SolverParams(
            gamma=float(_req(params_doc, "gamma", "$.params")),
            wait=float(_req(params_doc, "wait", "$.params")),
            neighborhood=int(_req(params_doc, "neighborhood", "$.params")),
            time_limit=float(_req(params_doc, "time_limit", "$.params")),
            seed=int(_req(params_doc, "seed", "$.params")),
            pruning=bool(_req(params_doc, "pruning", "$.params")),
            soft_mode=str(_req(params_doc, "soft_mode", "$.params")),
        )
    except ScenarioError as exc:
        raise ScenarioError(f"$.params: {exc}") from None
    try:
        return Scenario(grid, nfzs, tuple(fleet), params)
    except ScenarioError as exc:
        raise ScenarioError(f"$: {exc}") from None


def export_solution(result: SolveResult, sink: str | IO[str]) -> None:
    """Write a solve result; non-success results carry partial=true."""
    doc = {
        "format": SOLUTION_FORMAT,
        "status": result.status,
        "partial": not result.success,
        "flowtime": result.flowtime,
        "iterations": result.iterations,
        "conflict_history": result.conflict_history,
        "expanded_nodes": result.expanded_nodes,
        "wall_time": result.wall_time,
        "paths": [
            {
                "uav_id": t.uav_id,
                "radius": t.radius,
                "outbound_index": t.outbound_index,
                "wait_steps": t.wait_steps,
                "points": [[v[0], v[1], v[2], time] for v, time in t.points],
            }
            for t in sorted(result.paths.values(), key=lambda t: t.uav_id)
        ],
    }
    _dump(doc, sink)


def load_solution(source: str | IO[str]) -> tuple[dict, list[Trajectory]]:
    """Read a solution file back as (metadata, trajectories)."""
    doc = _load_json(source)
    fmt = _req(doc, "format", "$")
    if fmt != SOLUTION_FORMAT:
        raise ScenarioError(f"$.format: expected {SOLUTION_FORMAT!r}, got {fmt!r}")
    trajectories = []
    for i, p in enumerate(_req(doc, "paths", "$")):
        path = f"$.paths[{i}]"
        points_raw = _req(p, "points", path)
        points = []
        for j, item in enumerate(points_raw):
            if not isinstance(item, list) or len(item) != 4:
                raise ScenarioError(f"{path}.points[{j}]: expected [x, y, z, t]")
            points.append(((int(item[0]), int(item[1]), int(item[2])), float(item[3])))
        trajectories.append(
            Trajectory(
                uav_id=str(_req(p, "uav_id", path)),
                points=points,
                outbound_index=int(_req(p, "outbound_index", path)),
                wait_steps=int(_req(p, "wait_steps", path)),
                radius=float(_req(p, "radius", path)),
            )
        )
    meta = {k: doc.get(k) for k in ("status", "partial", "flowtime", "iterations", "wall_time")}
    return meta, trajectories


def load_city_map(source: str | IO[str]) -> tuple[GridMap, dict[str, Voxel], list[NoFlyZone]]:
    """Read a city map: grid, named hubs, and the zone schedule.

    Zones reaching below level 12 draw a LowAltitudeNfzWarning; a hub
    inside an obstacle is an error.
    """
    doc = _load_json(source)
    fmt = _req(doc, "format", "$")
    if fmt != CITYMAP_FORMAT:
        raise ScenarioError(f"$.format: expected {CITYMAP_FORMAT!r}, got {fmt!r}")
    dims_raw = _req(doc, "dims", "$")
    if not isinstance(dims_raw, list) or len(dims_raw) != 3:
        raise ScenarioError("$.dims: expected [dx, dy, dz]")
    obstacles_doc = _req(doc, "obstacles", "$")
    voxels: set[Voxel] = set()
    if "voxels" in obstacles_doc:
        voxels.update(
            _as_voxel(v, f"$.obstacles.voxels[{i}]")
            for i, v in enumerate(obstacles_doc["voxels"])
        )
    if "boxes" in obstacles_doc:
        for i, box in enumerate(obstacles_doc["boxes"]):
            voxels.update(_region_from_json({"box": box}, f"$.obstacles.boxes[{i}]"))
    if not ("voxels" in obstacles_doc or "boxes" in obstacles_doc):
        raise ScenarioError("$.obstacles: expected 'voxels' and/or 'boxes'")
    try:
        grid = GridMap(tuple(dims_raw), frozenset(voxels))
    except ScenarioError as exc:
        raise ScenarioError(f"$.obstacles: {exc}") from None
    hubs: dict[str, Voxel] = {}
    for name, raw in _req(doc, "hubs", "$").items():
        hub = _as_voxel(raw, f"$.hubs.{name}")
        if not grid.in_bounds(hub):
            raise ScenarioError(f"$.hubs.{name}: hub {hub} is out of bounds")
        if grid.is_hard_blocked(hub):
            raise ScenarioError(f"$.hubs.{name}: hub {hub} is inside an obstacle")
        hubs[name] = hub
    nfzs = []
    for i, z in enumerate(_req(doc, "nfzs", "$")):
        nfz = _nfz_from_json(z, f"$.nfzs[{i}]")
        floor_z = min(v[2] for v in nfz.region)
        if floor_z < CITY_NFZ_MIN_LEVEL:
            warnings.warn(
                f"city-map zone {i} reaches down to level {floor_z}, below the usual "
                f"restricted floor (z >= {CITY_NFZ_MIN_LEVEL})",
                LowAltitudeNfzWarning,
                stacklevel=2,
            )
        nfzs.append(nfz)
    return grid, hubs, nfzs


def build_city_fleet(
    grid: GridMap,
    hubs: dict[str, Voxel],
    n_agents: int,
    seed: int,
    *,
    t_init_range: tuple[float, float] = (1.0, 900.0),
    speed_range: tuple[float, float] = (1.5, 3.0),
    radius_range: tuple[float, float] = (1.0, 2.0),
) -> tuple[UavProfile, ...]:
    """Hub-based missions for a city map: each flight leaves a named hub
    for a random free voxel."""
    if not hubs:
        raise ScenarioError("city map has no hubs to build a fleet from")
    rng = random.Random(seed)
    dx, dy, dz = grid.dims
    free = [
        (x, y, z)
        for x in range(dx)
        for y in range(dy)
        for z in range(dz)
        if not grid.is_hard_blocked((x, y, z))
    ]
    hub_names = sorted(hubs)
    fleet = []
    for i in range(n_agents):
        hub = hubs[rng.choice(hub_names)]
        delivery = rng.choice(free)
        while delivery == hub:
            delivery = rng.choice(free)
        fleet.append(
            UavProfile(
                id=f"u{i:04d}",
                hub=hub,
                delivery=delivery,
                t_init=rng.uniform(*t_init_range),
                speed=rng.uniform(*speed_range),
                radius=rng.uniform(*radius_range),
            )
        )
    return tuple(fleet)
