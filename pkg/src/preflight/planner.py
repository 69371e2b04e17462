"""Single-agent 4D roundtrip-leg planner over (voxel, safe-interval) nodes.

Best-first search ordered by accumulated soft-conflict count, then by
earliest arrival plus a travel-time lower bound. Timed no-fly zones are
hard constraints encoded in the safe-interval table; other vehicles'
trajectories are soft: crossing them is penalized, never forbidden
(unless the planner runs in hard mode, where any conflicting move is
rejected outright).

A move departing voxel u at time td and arriving at neighbor v at
td + delta occupies u until the segment midpoint and v afterwards, so
feasibility requires u's window to cover [g, td + delta/2] and v's window
to cover [td + delta/2, arrival]. Arrivals are therefore floored at
window start + delta/2 rather than at the window start itself; anything
earlier would clip the corner of a still-active zone on the way in.
"""

from __future__ import annotations

import math
import time as _time
from dataclasses import dataclass
from heapq import heappop, heappush

from . import kernels
from .errors import PlanTimeout
from .geometry import PackedPaths
from .grid import GridMap, Voxel, move_distance
from .intervals import FULL_WINDOW, SafeInterval, SafeIntervalTable
from .model import UavProfile

_TIME_EPS = 1e-9
_DEADLINE_CHECK_MASK = 0x1FF  # test the clock every 512 pops


def direction_sector(a: Voxel, b: Voxel) -> tuple[int, int, int]:
    """Componentwise sign of the displacement a -> b."""
    return (
        (b[0] > a[0]) - (b[0] < a[0]),
        (b[1] > a[1]) - (b[1] < a[1]),
        (b[2] > a[2]) - (b[2] < a[2]),
    )


def _aligned_moves(grid: GridMap, loc: Voxel, goal: Voxel) -> tuple[tuple[Voxel, float], ...]:
    """Goal-aligned (move, length) candidates; full neighborhood when the
    alignment rules leave nothing but waiting. Cached per (location, sector)."""
    lx, ly, lz = loc
    tx, ty, tz = goal
    gx = (tx > lx) - (tx < lx)
    gy = (ty > ly) - (ty < ly)
    gz = (tz > lz) - (tz < lz)
    key = (loc, gx, gy, gz)
    cached = grid._pruned_cache.get(key)
    if cached is not None:
        return cached
    kept = []
    for move in grid.moves26(loc):
        nx, ny, nz = move[0]
        sx = (nx > lx) - (nx < lx)
        sy = (ny > ly) - (ny < ly)
        sz = (nz > lz) - (nz < lz)
        if (
            (sx == gx and sy == gy)
            or (sx == gx and sx != 0 and sy == 0)
            or (sy == gy and sy != 0 and sx == 0)
            or (sz == gz and sz != 0)
        ):
            kept.append(move)
    result = tuple(kept) if kept else grid.moves26(loc)
    grid._pruned_cache[key] = result
    return result


def pruned_neighbors(grid: GridMap, loc: Voxel, goal: Voxel) -> tuple[Voxel, ...]:
    """Goal-aligned subset of the 26-neighborhood, waiting always included.

    A neighbor survives when its direction sector matches the goal's
    quadrant in the XY plane, is a pure cardinal move along a matching
    axis, or descends/climbs toward the goal's level. If nothing but the
    wait action survives, the full neighborhood is returned instead, which
    keeps the search complete.
    """
    return (loc, *(n for n, _ in _aligned_moves(grid, loc, goal)))


def heuristic(v: Voxel, goal: Voxel, speed: float) -> float:
    """Straight-line flight time from v to goal; admissible for any grid path."""
    return math.dist(v, goal) / speed


@dataclass(slots=True)
class SearchNode:
    v: Voxel
    interval: SafeInterval
    interval_id: int
    g: float
    h: float
    c: int
    parent: "SearchNode | None"


@dataclass
class SearchStats:
    """Counters shared across planner invocations of one solve call."""

    expanded: int = 0
    expanded_costs: list[int] | None = None


@dataclass
class Leg:
    """One planned leg: timestamped points plus its soft-conflict count."""

    points: list[tuple[Voxel, float]]
    conflicts: int

    @property
    def arrival(self) -> float:
        return self.points[-1][1]


def backtrack_path(node: SearchNode, speed: float) -> list[tuple[Voxel, float]]:
    """Parent-chain points of a goal node in time order.

    A move that left its predecessor later than that node's arrival (to meet
    a window opening) gets an explicit wait tuple at the predecessor voxel,
    so consecutive points are always traversed at the cruise speed.
    """
    pts: list[tuple[Voxel, float]] = []
    cur: SearchNode | None = node
    while cur is not None:
        pts.append((cur.v, cur.g))
        parent = cur.parent
        if parent is not None:
            depart = cur.g - move_distance(parent.v, cur.v) / speed
            if depart > parent.g + _TIME_EPS:
                pts.append((parent.v, depart))
        cur = parent
    pts.reverse()
    return pts


def plan(
    grid: GridMap,
    table: SafeIntervalTable,
    profile: UavProfile,
    start: Voxel,
    goal: Voxel,
    depart_not_before: float,
    soft: PackedPaths | None,
    gamma: float,
    *,
    pruning: bool = True,
    hard_soft: bool = False,
    goal_dwell: float = 0.0,
    deadline: float | None = None,
    stats: SearchStats | None = None,
) -> Leg | None:
    """Plan one timestamped leg from start to goal, or None when impossible.

    The leg departs no earlier than depart_not_before, stays inside the
    agent's safe windows throughout, and among reachable arrivals minimizes
    the number of soft trajectories conflicted, then the arrival time. With
    hard_soft=True any conflicting move is infeasible instead of penalized.
    goal_dwell extends conflict accounting over a post-arrival hold at the
    goal, so on-site package handover is visible to the optimization.
    Raises PlanTimeout when `deadline` (time.monotonic) passes mid-search.
    """
    speed = profile.speed
    radius = profile.radius
    inv_speed = 1.0 / speed
    first = table.first_safe_interval(start, depart_not_before)
    if first is None:
        return None
    i0 = table.intervals_at(start).index(first)
    t_s = max(depart_not_before, first.start)
    if start == goal:
        return Leg([(start, t_s)], 0)

    # One probe per candidate: exempt vertices override their zone windows.
    eff_windows = dict(table.windows)
    for e in table.exempt_vertices:
        eff_windows[e] = FULL_WINDOW
    windows_get = eff_windows.get
    count_kernel = kernels.count_conflicting_paths
    if soft is not None and len(soft) > 0:
        s_off, s_t = soft.offsets, soft.times
        s_x, s_y, s_z = soft.xs, soft.ys, soft.zs
        s_r, s_b = soft.radii, soft.bounds
    else:
        soft = None

    _dist = math.dist
    # Every feasible (neighbor, window) candidate is pushed; conflict costs
    # are settled lazily when an entry surfaces (a reinsert with the true
    # cost when the motion does conflict), and an entry is discarded when
    # some already-expanded node of its (voxel, window) key is at least as
    # good on both conflicts and arrival. Expansion order therefore matches
    # eager evaluation while only surfaced nodes pay for conflict checks.
    settled_default = soft is None
    h0 = _dist(start, goal) * inv_speed
    heap: list[tuple] = []
    seq = 0
    # entry: (c, f, h, seq, g, v, interval_id, interval, parent, settled)
    heappush(heap, (0, t_s + h0, h0, seq, t_s, start, i0, first, None, True))
    expanded: dict[tuple[Voxel, int], list[tuple[int, float]]] = {}
    pops = 0

    while heap:
        c, f, h, _, g, v, idx, iv, parent, settled = heappop(heap)
        pops += 1
        if stats is not None:
            stats.expanded += 1
        if deadline is not None and (pops & _DEADLINE_CHECK_MASK) == 0 and _time.monotonic() > deadline:
            raise PlanTimeout("single-agent search exceeded its deadline")
        key = (v, idx)
        done = expanded.get(key)
        if done is not None:
            dominated = False
            for oc, og in done:
                if oc <= c and og <= g:
                    dominated = True
                    break
            if dominated:
                continue
        if not settled:
            # conflict cost was deferred at generation time
            delta = move_distance(parent.v, v) * inv_speed
            t_dep = g - delta
            pg = parent.g
            px, py, pz = float(parent.v[0]), float(parent.v[1]), float(parent.v[2])
            c_inc = count_kernel(
                s_off, s_t, s_x, s_y, s_z, s_r, s_b,
                px, py, pz, pg, t_dep, 1 if t_dep > pg + _TIME_EPS else 0,
                px, py, pz, float(v[0]), float(v[1]), float(v[2]),
                t_dep, g,
                goal_dwell if v == goal else 0.0,
                radius, gamma,
            )
            if c_inc:
                if hard_soft:
                    continue
                seq += 1
                heappush(heap, (c + c_inc, f, h, seq, g, v, idx, iv, parent, True))
                continue
        if done is None:
            expanded[key] = [(c, g)]
        else:
            done.append((c, g))
        if stats is not None and stats.expanded_costs is not None:
            stats.expanded_costs.append(c)
        node = SearchNode(v, iv, idx, g, h, c, parent)
        if v == goal:
            return Leg(backtrack_path(node, speed), c)

        candidates = _aligned_moves(grid, v, goal) if pruning else grid.moves26(v)
        interval_end = iv.end
        for v2, dist in candidates:
            delta = dist * inv_speed
            half = 0.5 * delta
            floor_arrival = g + delta
            ivs = windows_get(v2, FULL_WINDOW)
            if len(ivs) == 1:
                iv2 = ivs[0]
                t_arr = iv2.start + half
                if t_arr < floor_arrival:
                    t_arr = floor_arrival
                if t_arr >= iv2.end or t_arr - half > interval_end:
                    continue
                h2 = _dist(v2, goal) * inv_speed
                seq += 1
                heappush(heap, (c, t_arr + h2, h2, seq, t_arr, v2, 0, iv2, node, settled_default))
                continue
            for idx2 in range(len(ivs)):
                iv2 = ivs[idx2]
                t_arr = iv2.start + half
                if t_arr < floor_arrival:
                    t_arr = floor_arrival
                if t_arr >= iv2.end:
                    continue
                if t_arr - half > interval_end:  # would outstay the current window
                    continue
                h2 = _dist(v2, goal) * inv_speed
                seq += 1
                heappush(
                    heap,
                    (c, t_arr + h2, h2, seq, t_arr, v2, idx2, iv2, node, settled_default),
                )
    return None
