"""Fleet-level orchestration: urgency-ordered planning plus conflict repair.

The main solver plans every mission in ascending start-time order against
the already-planned fleet (soft constraints), then repeatedly picks a
neighborhood of conflicting vehicles off the collision graph, removes
their trajectories, and replans them one at a time against everything
else until no separation violations remain or the time budget runs out.
The priority baseline plans one pass with conflicts treated as hard and
never repairs.
"""

from __future__ import annotations

import math
import random
import time as _time
from bisect import bisect_right
from typing import TYPE_CHECKING, Iterable, Mapping

import numpy as np

from .errors import ContractError, PlanTimeout
from .geometry import CollisionGraph, ConflictRecord, PackedPaths, count_conflicts, pair_conflict_record
from .grid import GridMap
from .intervals import NoFlyZone, SafeIntervalTable, compute_blocked_windows
from .model import SolveResult, SolverParams, Trajectory, UavProfile
from .planner import Leg, SearchStats, plan

if TYPE_CHECKING:
    from .scenario import Scenario

_TIME_EPS = 1e-9


def sort_by_urgency(uavs: Iterable[UavProfile], rng: random.Random) -> list[UavProfile]:
    """Ascending start time; groups with equal start time are shuffled."""
    ordered = sorted(uavs, key=lambda u: u.t_init)
    i = 0
    while i < len(ordered):
        j = i + 1
        while j < len(ordered) and ordered[j].t_init == ordered[i].t_init:
            j += 1
        if j - i > 1:
            group = ordered[i:j]
            rng.shuffle(group)
            ordered[i:j] = group
        i = j
    return ordered


def _wait_block(delivery, arrival: float, wait: float) -> list[tuple]:
    """Dwell tuples at the delivery voxel, quantized to 1 s steps."""
    pts = []
    full = int(math.floor(wait + _TIME_EPS))
    for k in range(1, full + 1):
        pts.append((delivery, arrival + k))
    if wait - full > _TIME_EPS:
        pts.append((delivery, arrival + wait))
    return pts


def _combine_roundtrip(profile: UavProfile, outbound: Leg, wait: float, ret: Leg) -> Trajectory:
    arrival = outbound.arrival
    points = list(outbound.points)
    points.extend(_wait_block(profile.delivery, arrival, wait))
    ret_points = ret.points
    if ret_points[0][1] <= points[-1][1] + _TIME_EPS:  # shared boundary tuple
        ret_points = ret_points[1:]
    points.extend(ret_points)
    outbound_index = len(outbound.points) - 1
    wait_steps = 0
    k = outbound_index + 1
    while k < len(points) and points[k][0] == profile.delivery:
        wait_steps += 1
        k += 1
    return Trajectory(
        uav_id=profile.id,
        points=points,
        outbound_index=outbound_index,
        wait_steps=wait_steps,
        radius=profile.radius,
    )


# Hub-departure delays tried when the preferred roundtrip still conflicts
# (or, in hard mode, does not exist). Waiting happens parked at the own hub
# before the mission starts, so the leg searches themselves stay unchanged.
_DELAY_LADDER = (0.0, 4.0, 10.0, 25.0, 60.0, 150.0, 400.0)


def plan_round_trip(
    profile: UavProfile,
    grid: GridMap,
    nfzs: Iterable[NoFlyZone],
    soft_paths: Iterable[Trajectory],
    params: SolverParams,
    *,
    table: SafeIntervalTable | None = None,
    hard_soft: bool = False,
    deadline: float | None = None,
    stats: SearchStats | None = None,
) -> Trajectory | None:
    """Outbound leg, on-site dwell, return leg as one trajectory, or None.

    Both legs treat `soft_paths` as soft obstacles; the dwell is part of the
    outbound leg's conflict accounting. When even the best soft roundtrip
    stays in conflict, departure is retried along a delay ladder, since a
    later start often separates the mission from crossing traffic outright;
    the least-conflicted candidate wins if no retry reaches zero. Hard mode
    (the priority baseline) makes exactly one attempt: it either finds a
    conflict-free roundtrip straight away or fails. The vehicle's own
    outbound and dwell never count against its return leg (their time
    windows precede it), so they are left out of the packed set.
    """
    if table is None:
        table = SafeIntervalTable(
            grid, compute_blocked_windows(grid, nfzs), frozenset((profile.hub, profile.delivery))
        )
    packed = PackedPaths(soft_paths, exclude_id=profile.id)
    best: tuple[int, Leg, Leg] | None = None
    for delay in (0.0,) if hard_soft else _DELAY_LADDER:
        outbound = plan(
            grid, table, profile, profile.hub, profile.delivery, profile.t_init + delay,
            packed, params.gamma,
            pruning=params.pruning, hard_soft=hard_soft, goal_dwell=params.wait,
            deadline=deadline, stats=stats,
        )
        if outbound is None:
            # hard mode: no conflict-free route; soft mode: the world itself
            # is infeasible and no delay will change that
            return None
        ret = plan(
            grid, table, profile, profile.delivery, profile.hub, outbound.arrival + params.wait,
            packed, params.gamma,
            pruning=params.pruning, hard_soft=hard_soft,
            deadline=deadline, stats=stats,
        )
        if ret is None:
            return None
        total = outbound.conflicts + ret.conflicts
        if total == 0:
            return _combine_roundtrip(profile, outbound, params.wait, ret)
        if best is None or total < best[0]:
            best = (total, outbound, ret)
    if best is None:
        return None
    return _combine_roundtrip(profile, best[1], params.wait, best[2])


def _interp_position(times: np.ndarray, coords: np.ndarray, t: float) -> tuple[float, float, float] | None:
    if t < times[0] or t > times[-1]:
        return None
    k = min(max(bisect_right(times, t) - 1, 0), len(times) - 2)
    dt = times[k + 1] - times[k]
    f = 0.0 if dt <= 0 else (t - times[k]) / dt
    p = coords[k] + (coords[k + 1] - coords[k]) * f
    return (float(p[0]), float(p[1]), float(p[2]))


_WALK_ATTEMPTS = 20
_WALK_STEP_SECONDS = 1.0
_GRAPH_WALK_CAP_FACTOR = 50


def conflict_neighborhood(
    cg: CollisionGraph,
    paths: Mapping[str, Trajectory],
    n: int,
    rng: random.Random,
    grid: GridMap,
    gamma: float,
) -> set[str]:
    """Pick the vehicles to replan, guided by the collision graph.

    Seeds from the connected component of a random conflicted vehicle.
    Small components are grown by spatial random walks along the airspace,
    pulling in any vehicle whose safety envelope the walk touches; large
    components are subsampled by a random walk on the graph itself, which
    biases selection toward densely tangled conflicts.
    """
    conflicted = cg.conflicted()
    if not conflicted:
        raise ContractError("conflict_neighborhood requires a graph with at least one edge")
    v0 = rng.choice(conflicted)
    component = cg.component(v0)

    if len(component) > n:
        selected: list[str] = [v0]
        seen = {v0}
        cur = v0
        for _ in range(_GRAPH_WALK_CAP_FACTOR * n):
            if len(selected) >= n:
                break
            cur = rng.choice(cg.neighbors(cur))
            if cur not in seen:
                seen.add(cur)
                selected.append(cur)
        if len(selected) < n:
            rest = [u for u in component if u not in seen]
            rng.shuffle(rest)
            selected.extend(rest[: n - len(selected)])
        return set(selected)

    selected_set = set(component)
    others = [uid for uid in paths if uid not in selected_set]
    for _ in range(_WALK_ATTEMPTS):
        if len(selected_set) >= n or not others:
            break
        walker_id = rng.choice(sorted(selected_set))
        walker = paths[walker_id]
        k = rng.randrange(len(walker.points))
        v, t = walker.points[k]
        steps = 10 * len(walker.points)
        walk_v = [v]
        walk_t = [t]
        for _ in range(steps):
            options = grid.neighbors26(v) + (v,)
            v = options[rng.randrange(len(options))]
            t += _WALK_STEP_SECONDS
            walk_v.append(v)
            walk_t.append(t)
        wt = np.array(walk_t)
        wc = np.array(walk_v, dtype=np.float64)
        hits: list[tuple[int, str]] = []
        for other_id in others:
            if other_id in selected_set:
                continue
            other = paths[other_id]
            thresh = walker.radius + other.radius + gamma
            times, coords = other.arrays
            if times[-1] < wt[0] or times[0] > wt[-1]:
                continue
            mask = (wt >= times[0]) & (wt <= times[-1])
            if not mask.any():
                continue
            ts = wt[mask]
            px = np.interp(ts, times, coords[:, 0])
            py = np.interp(ts, times, coords[:, 1])
            pz = np.interp(ts, times, coords[:, 2])
            sub = wc[mask]
            d2 = (sub[:, 0] - px) ** 2 + (sub[:, 1] - py) ** 2 + (sub[:, 2] - pz) ** 2
            close = np.nonzero(d2 <= thresh * thresh)[0]
            if close.size:
                step_idx = int(np.nonzero(mask)[0][close[0]])
                hits.append((step_idx, other_id))
        for _, other_id in sorted(hits):
            if len(selected_set) >= n:
                break
            selected_set.add(other_id)
        others = [uid for uid in others if uid not in selected_set]
    return selected_set


def _refresh_edges(
    cg: CollisionGraph, paths: Mapping[str, Trajectory], changed: set[str], gamma: float
) -> CollisionGraph:
    """Recompute only edges touching replanned vehicles; others carry over.

    Produces the same graph a full recount would.
    """
    edges: dict[tuple[str, str], ConflictRecord] = {
        pair: rec
        for pair, rec in cg.edges.items()
        if pair[0] not in changed and pair[1] not in changed and pair[0] in paths and pair[1] in paths
    }
    for cid in sorted(changed):
        a = paths[cid]
        for other_id, b in paths.items():
            if other_id == cid or (other_id in changed and other_id < cid):
                continue
            rec = pair_conflict_record(a, b, gamma)
            if rec is not None:
                edges[(rec.uav_a, rec.uav_b)] = rec
    return CollisionGraph(paths.keys(), edges)


def _result(
    status: str,
    paths: dict[str, Trajectory],
    iterations: int,
    history: list[int],
    t0: float,
    stats: SearchStats,
) -> SolveResult:
    return SolveResult(
        status=status,
        paths=paths,
        flowtime=sum(t.duration for t in paths.values()),
        iterations=iterations,
        conflict_history=history,
        wall_time=_time.monotonic() - t0,
        expanded_nodes=stats.expanded,
    )


def solve(scenario: "Scenario", *, initial_soft: bool = True) -> SolveResult:
    """Plan the whole fleet: urgency pass, then iterative conflict repair.

    Returns success only with a separation-clean solution; timeout when
    the budget expires first; failure if some mission has no zone- and
    obstacle-feasible roundtrip at all (soft conflicts never cause this).
    initial_soft=False makes the first pass ignore already-planned paths,
    an ablation of the accumulate-as-you-go default.
    """
    params = scenario.params
    t0 = _time.monotonic()
    deadline = t0 + params.time_limit
    rng = random.Random(params.seed)
    stats = SearchStats()
    windows = compute_blocked_windows(scenario.grid, scenario.nfzs)
    base = SafeIntervalTable(scenario.grid, windows)
    order = sort_by_urgency(scenario.fleet, rng)
    profiles = {p.id: p for p in scenario.fleet}

    paths: dict[str, Trajectory] = {}
    try:
        for prof in order:
            traj = plan_round_trip(
                prof, scenario.grid, scenario.nfzs,
                paths.values() if initial_soft else (),
                params,
                table=base.with_exempt((prof.hub, prof.delivery)),
                deadline=deadline, stats=stats,
            )
            if traj is None:
                return _result("failure", paths, 0, [], t0, stats)
            paths[prof.id] = traj
    except PlanTimeout:
        return _result("timeout", paths, 0, [], t0, stats)

    cg = count_conflicts(paths.values(), params.gamma)
    history = [cg.num_conflicts]
    iterations = 0
    timed_out = False
    while cg.num_conflicts > 0 and _time.monotonic() < deadline:
        selected = conflict_neighborhood(cg, paths, params.neighborhood, rng, scenario.grid, params.gamma)
        ordered_ids = [p.id for p in order if p.id in selected]
        removed = {uid: paths.pop(uid) for uid in ordered_ids}
        readded: list[str] = []
        failed = False
        for uid in ordered_ids:
            prof = profiles[uid]
            try:
                traj = plan_round_trip(
                    prof, scenario.grid, scenario.nfzs, paths.values(), params,
                    table=base.with_exempt((prof.hub, prof.delivery)),
                    deadline=deadline, stats=stats,
                )
            except PlanTimeout:
                failed = True
                timed_out = True
                break
            if traj is None:
                failed = True
                break
            paths[uid] = traj
            readded.append(uid)
        if failed:
            for uid in readded:
                paths.pop(uid)
            paths.update(removed)
        else:
            cg = _refresh_edges(cg, paths, set(ordered_ids), params.gamma)
        iterations += 1
        history.append(cg.num_conflicts)
        if timed_out:
            break

    status = "success" if cg.num_conflicts == 0 else "timeout"
    return _result(status, paths, iterations, history, t0, stats)


def solve_pp_baseline(scenario: "Scenario") -> SolveResult:
    """One urgency-ordered pass with conflicting moves forbidden outright.

    No repair loop: planning failure for any mission fails the whole run.
    """
    params = scenario.params
    t0 = _time.monotonic()
    deadline = t0 + params.time_limit
    rng = random.Random(params.seed)
    stats = SearchStats()
    windows = compute_blocked_windows(scenario.grid, scenario.nfzs)
    base = SafeIntervalTable(scenario.grid, windows)
    order = sort_by_urgency(scenario.fleet, rng)

    paths: dict[str, Trajectory] = {}
    try:
        for prof in order:
            traj = plan_round_trip(
                prof, scenario.grid, scenario.nfzs, paths.values(), params,
                table=base.with_exempt((prof.hub, prof.delivery)),
                hard_soft=True, deadline=deadline, stats=stats,
            )
            if traj is None:
                return _result("failure", paths, 0, [], t0, stats)
            paths[prof.id] = traj
    except PlanTimeout:
        return _result("timeout", paths, 0, [], t0, stats)

    cg = count_conflicts(paths.values(), params.gamma)
    status = "success" if cg.num_conflicts == 0 else "failure"
    return _result(status, paths, 0, [cg.num_conflicts], t0, stats)
