"""Continuous-time collision engine for constant-velocity spherical vehicles.

Two vehicles conflict when their center distance drops to or below
r_a + r_b + gamma at any shared instant (tangency counts as a conflict).
Vehicles are absent from the airspace outside their trajectory's time
span. The closed-form narrow phase lives in :mod:`preflight.kernels`;
this module adds segment/path packing, conflict classification, and the
fleet-level collision graph with its broad phase.
"""

from __future__ import annotations

import math
from bisect import bisect_right
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from . import kernels
from .errors import ContractError
from .grid import Voxel
from .model import Trajectory

PURSUIT = "pursuit"
HEAD_ON = "head-on"
INTERSECTION = "intersection"

DEFAULT_CONE_DEG = 30.0

_BROAD_CELL = 8.0  # meters per spatial hash cell
_BROAD_TBUCKET = 16.0  # seconds per time bucket


@dataclass(frozen=True)
class MotionSegment:
    """Straight constant-velocity motion from `a` to `b` over [t0, t1].

    Position is linear interpolation inside the window and clamps to the
    endpoints outside it. A hold in place has a == b.
    """

    a: tuple[float, float, float]
    b: tuple[float, float, float]
    t0: float
    t1: float

    def __post_init__(self) -> None:
        if self.t1 < self.t0:
            raise ContractError(f"segment window [{self.t0}, {self.t1}] is reversed")

    @classmethod
    def between_voxels(cls, va: Voxel, vb: Voxel, t0: float, t1: float) -> "MotionSegment":
        return cls(tuple(map(float, va)), tuple(map(float, vb)), t0, t1)

    @property
    def velocity(self) -> tuple[float, float, float]:
        dt = self.t1 - self.t0
        if dt <= 0.0:
            return (0.0, 0.0, 0.0)
        return (
            (self.b[0] - self.a[0]) / dt,
            (self.b[1] - self.a[1]) / dt,
            (self.b[2] - self.a[2]) / dt,
        )

    def position_at(self, t: float) -> tuple[float, float, float]:
        if t <= self.t0 or self.t1 <= self.t0:
            return self.a
        if t >= self.t1:
            return self.b
        f = (t - self.t0) / (self.t1 - self.t0)
        return (
            self.a[0] + (self.b[0] - self.a[0]) * f,
            self.a[1] + (self.b[1] - self.a[1]) * f,
            self.a[2] + (self.b[2] - self.a[2]) * f,
        )


def min_separation(a: MotionSegment, b: MotionSegment) -> tuple[float, float]:
    """Minimum center distance over the overlap of the two windows.

    Returns (distance, time of minimum); (inf, nan) for disjoint windows.
    """
    return kernels.segment_min_separation(
        a.a[0], a.a[1], a.a[2], a.t0, a.b[0], a.b[1], a.b[2], a.t1,
        b.a[0], b.a[1], b.a[2], b.t0, b.b[0], b.b[1], b.b[2], b.t1,
    )


def segments_conflict(
    a: MotionSegment, b: MotionSegment, r_a: float, r_b: float, gamma: float
) -> bool:
    """True iff the pair violates the separation requirement at some instant."""
    dist, _ = min_separation(a, b)
    return dist <= r_a + r_b + gamma


def classify_velocities(
    va: Sequence[float], vb: Sequence[float], cone_deg: float = DEFAULT_CONE_DEG
) -> str:
    """Label a conflicting encounter from the two velocity directions.

    Within cone_deg of parallel -> pursuit, of antiparallel -> head-on,
    anything else (including a hovering party) -> intersection.
    """
    na = math.sqrt(va[0] ** 2 + va[1] ** 2 + va[2] ** 2)
    nb = math.sqrt(vb[0] ** 2 + vb[1] ** 2 + vb[2] ** 2)
    if na == 0.0 or nb == 0.0:
        return INTERSECTION
    dot = (va[0] * vb[0] + va[1] * vb[1] + va[2] * vb[2]) / (na * nb)
    cone = math.cos(math.radians(cone_deg))
    if dot > cone:
        return PURSUIT
    if dot < -cone:
        return HEAD_ON
    return INTERSECTION


def classify_conflict(
    a: MotionSegment, b: MotionSegment, cone_deg: float = DEFAULT_CONE_DEG
) -> str:
    """Classify an encounter between two conflicting segments.

    Callers guarantee the pair actually conflicts for their radii; a pair
    with disjoint windows is rejected outright.
    """
    if max(a.t0, b.t0) > min(a.t1, b.t1):
        raise ContractError("cannot classify segments with disjoint time windows")
    return classify_velocities(a.velocity, b.velocity, cone_deg)


@dataclass(frozen=True)
class ConflictRecord:
    """A detected separation violation between two vehicles."""

    uav_a: str
    uav_b: str
    time: float
    kind: str
    distance: float


class PackedPaths:
    """Trajectories flattened into contiguous arrays for the kernels."""

    __slots__ = ("ids", "radii", "offsets", "times", "xs", "ys", "zs", "bounds")

    def __init__(self, trajectories: Iterable[Trajectory], exclude_id: str | None = None):
        trajs = [t for t in trajectories if t.uav_id != exclude_id]
        self.ids = [t.uav_id for t in trajs]
        self.radii = np.array([t.radius for t in trajs], dtype=np.float64)
        counts = [len(t.points) for t in trajs]
        self.offsets = np.zeros(len(trajs) + 1, dtype=np.int64)
        np.cumsum(counts, out=self.offsets[1:])
        total = int(self.offsets[-1])
        self.times = np.empty(total, dtype=np.float64)
        self.xs = np.empty(total, dtype=np.float64)
        self.ys = np.empty(total, dtype=np.float64)
        self.zs = np.empty(total, dtype=np.float64)
        self.bounds = np.empty((len(trajs), 8), dtype=np.float64)
        for i, t in enumerate(trajs):
            times, coords = t.arrays
            lo, hi = int(self.offsets[i]), int(self.offsets[i + 1])
            self.times[lo:hi] = times
            self.xs[lo:hi] = coords[:, 0]
            self.ys[lo:hi] = coords[:, 1]
            self.zs[lo:hi] = coords[:, 2]
            self.bounds[i] = (
                times[0], times[-1],
                coords[:, 0].min(), coords[:, 0].max(),
                coords[:, 1].min(), coords[:, 1].max(),
                coords[:, 2].min(), coords[:, 2].max(),
            )

    def __len__(self) -> int:
        return len(self.ids)

    def count_conflicting(
        self,
        move: MotionSegment,
        radius: float,
        gamma: float,
        wait: MotionSegment | None = None,
        dwell: float = 0.0,
    ) -> int:
        """Distinct packed paths conflicting with a hold/move/hold motion.

        `wait` is an optional pre-move hold; `dwell` an optional hold of that
        many seconds at the move's end point. Each path counts once even if
        several parts of the motion conflict with it.
        """
        if not self.ids:
            return 0
        if wait is None:
            wx = wy = wz = wt0 = wt1 = 0.0
            has_wait = 0
        else:
            wx, wy, wz = wait.a
            wt0, wt1 = wait.t0, wait.t1
            has_wait = 1
        return kernels.count_conflicting_paths(
            self.offsets, self.times, self.xs, self.ys, self.zs, self.radii, self.bounds,
            wx, wy, wz, wt0, wt1, has_wait,
            move.a[0], move.a[1], move.a[2],
            move.b[0], move.b[1], move.b[2],
            move.t0, move.t1,
            dwell,
            radius, gamma,
        )


def geo_conflict(
    move: MotionSegment,
    radius: float,
    gamma: float,
    soft_paths: Iterable[Trajectory] | PackedPaths,
) -> int:
    """Number of distinct soft trajectories conflicting with one motion."""
    packed = soft_paths if isinstance(soft_paths, PackedPaths) else PackedPaths(soft_paths)
    return packed.count_conflicting(move, radius, gamma)


def _velocity_at(times: np.ndarray, coords: np.ndarray, t: float) -> tuple[float, float, float]:
    """Velocity of the segment active at time t (0 outside the span)."""
    n = len(times)
    if n < 2 or t < times[0] or t > times[-1]:
        return (0.0, 0.0, 0.0)
    k = min(max(bisect_right(times, t) - 1, 0), n - 2)
    dt = times[k + 1] - times[k]
    if dt <= 0.0:
        return (0.0, 0.0, 0.0)
    d = (coords[k + 1] - coords[k]) / dt
    return (float(d[0]), float(d[1]), float(d[2]))


def pair_conflict_record(
    a: Trajectory, b: Trajectory, gamma: float
) -> ConflictRecord | None:
    """Analytic check of one trajectory pair; a record when they conflict."""
    ta, ca = a.arrays
    tb, cb = b.arrays
    dist, t_min = kernels.path_pair_min_separation(
        ta, ca[:, 0], ca[:, 1], ca[:, 2],
        tb, cb[:, 0], cb[:, 1], cb[:, 2],
    )
    if dist > a.radius + b.radius + gamma:
        return None
    kind = classify_velocities(_velocity_at(ta, ca, t_min), _velocity_at(tb, cb, t_min))
    first, second = (a.uav_id, b.uav_id) if a.uav_id <= b.uav_id else (b.uav_id, a.uav_id)
    return ConflictRecord(first, second, t_min, kind, dist)


class CollisionGraph:
    """Vehicles as vertices, pairwise separation violations as edges."""

    def __init__(self, vertices: Iterable[str], edges: dict[tuple[str, str], ConflictRecord]):
        self.vertices = tuple(vertices)
        self.edges = edges
        self._adj: dict[str, list[str]] = {v: [] for v in self.vertices}
        for (u, v) in edges:
            self._adj[u].append(v)
            self._adj[v].append(u)
        for nbrs in self._adj.values():
            nbrs.sort()

    @property
    def num_conflicts(self) -> int:
        return len(self.edges)

    def degree(self, uav_id: str) -> int:
        return len(self._adj[uav_id])

    def neighbors(self, uav_id: str) -> list[str]:
        return self._adj[uav_id]

    def conflicted(self) -> list[str]:
        return sorted(v for v in self.vertices if self._adj[v])

    def component(self, uav_id: str) -> list[str]:
        """Connected component containing uav_id, sorted."""
        seen = {uav_id}
        frontier = [uav_id]
        while frontier:
            nxt = []
            for u in frontier:
                for w in self._adj[u]:
                    if w not in seen:
                        seen.add(w)
                        nxt.append(w)
            frontier = nxt
        return sorted(seen)


def _broad_candidate_pairs(trajs: list[Trajectory], gamma: float) -> set[tuple[int, int]]:
    """Spatio-temporal hash of path segments into cell/time buckets.

    Each segment's swept box is inflated by the path radius plus half the
    shared buffer, so any pair that can violate separation shares at least
    one bucket: the filter is conservative by construction.
    """
    buckets: dict[tuple[int, int, int, int], list[int]] = {}
    inv_cell = 1.0 / _BROAD_CELL
    inv_tb = 1.0 / _BROAD_TBUCKET
    for idx, tr in enumerate(trajs):
        grow = tr.radius + 0.5 * gamma
        times, coords = tr.arrays
        ts = times.tolist()
        pts = coords.tolist()
        for k in range(len(ts) - 1):
            x0, y0, z0 = pts[k]
            x1, y1, z1 = pts[k + 1]
            cx0 = math.floor((min(x0, x1) - grow) * inv_cell)
            cx1 = math.floor((max(x0, x1) + grow) * inv_cell)
            cy0 = math.floor((min(y0, y1) - grow) * inv_cell)
            cy1 = math.floor((max(y0, y1) + grow) * inv_cell)
            cz0 = math.floor((min(z0, z1) - grow) * inv_cell)
            cz1 = math.floor((max(z0, z1) + grow) * inv_cell)
            tb0 = math.floor(ts[k] * inv_tb)
            tb1 = math.floor(ts[k + 1] * inv_tb)
            for cx in range(cx0, cx1 + 1):
                for cy in range(cy0, cy1 + 1):
                    for cz in range(cz0, cz1 + 1):
                        for tb in range(tb0, tb1 + 1):
                            cell = buckets.setdefault((cx, cy, cz, tb), [])
                            if not cell or cell[-1] != idx:
                                cell.append(idx)
    pairs: set[tuple[int, int]] = set()
    for members in buckets.values():
        if len(members) < 2:
            continue
        for i in range(len(members)):
            for j in range(i + 1, len(members)):
                a, b = members[i], members[j]
                pairs.add((a, b) if a < b else (b, a))
    return pairs


def count_conflicts(
    paths: Iterable[Trajectory], gamma: float, *, broad_phase: bool = True
) -> CollisionGraph:
    """Collision graph over a set of trajectories.

    With broad_phase=False every pair is checked directly; the default
    hashed filter yields the identical graph and exists purely for speed.
    """
    trajs = list(paths)
    ids = [t.uav_id for t in trajs]
    if len(set(ids)) != len(ids):
        raise ContractError("trajectories must have pairwise distinct uav ids")
    if broad_phase:
        candidates = sorted(_broad_candidate_pairs(trajs, gamma))
    else:
        candidates = [(i, j) for i in range(len(trajs)) for j in range(i + 1, len(trajs))]
    edges: dict[tuple[str, str], ConflictRecord] = {}
    for i, j in candidates:
        rec = pair_conflict_record(trajs[i], trajs[j], gamma)
        if rec is not None:
            edges[(rec.uav_a, rec.uav_b)] = rec
    return CollisionGraph(ids, edges)
