"""Independent solution checker based on dense time sampling.

Deliberately shares no code with the planner's analytic conflict engine:
positions are resampled on a fixed dt lattice and tested directly against
zone activity windows and pairwise separation, so the two subsystems have
different failure modes. Structural roundtrip rules (endpoints at the
hub, monotone times, on-site dwell) are checked exactly.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import IO, Iterable

import numpy as np

from .errors import ScenarioError
from .model import Trajectory
from .scenario import Scenario

_EPS = 1e-9


def flowtime(paths: Iterable[Trajectory]) -> float:
    """Sum over vehicles of mission duration (last minus first timestamp)."""
    total = 0.0
    for t in paths:
        if not t.points:
            raise ScenarioError(f"trajectory {t.uav_id} has no points")
        total += t.points[-1][1] - t.points[0][1]
    return total


@dataclass
class ValidationReport:
    """Every sampled or structural rule violation found in a solution."""

    dt: float
    nfz_violations: list[dict] = field(default_factory=list)
    separation_violations: list[dict] = field(default_factory=list)
    structural_violations: list[dict] = field(default_factory=list)
    conflict_records: list[dict] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not (
            self.nfz_violations or self.separation_violations or self.structural_violations
        )

    def counts(self) -> dict[str, int]:
        return {
            "nfz": len(self.nfz_violations),
            "separation": len(self.separation_violations),
            "structural": len(self.structural_violations),
        }

    def to_json(self) -> dict:
        return {
            "format": "preflight.validation/1",
            "ok": self.ok,
            "dt": self.dt,
            "nfz_violations": self.nfz_violations,
            "separation_violations": self.separation_violations,
            "structural_violations": self.structural_violations,
            "conflict_records": self.conflict_records,
        }

    def save(self, sink: str | IO[str]) -> None:
        if hasattr(sink, "write"):
            json.dump(self.to_json(), sink, indent=1)
            sink.write("\n")
        else:
            with open(sink, "w") as fh:
                json.dump(self.to_json(), fh, indent=1)
                fh.write("\n")


def _sample(traj: Trajectory, dt: float) -> tuple[np.ndarray, np.ndarray]:
    """Positions on the global k*dt lattice across the trajectory span."""
    times, coords = traj.arrays
    k0 = math.ceil(times[0] / dt - _EPS)
    k1 = math.floor(times[-1] / dt + _EPS)
    ts = np.arange(k0, k1 + 1, dtype=np.float64) * dt
    pos = np.empty((len(ts), 3))
    for axis in range(3):
        pos[:, axis] = np.interp(ts, times, coords[:, axis])
    return ts, pos


def _voxel_keys(pos: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Nearest voxel per sample plus a strictly-inside-the-cube mask.

    Points exactly on a cube face belong to no voxel: a boundary instant
    between two cubes cannot be a zone violation on its own.
    """
    keys = np.floor(pos + 0.5).astype(np.int64)
    inside = np.all(np.abs(pos - keys) < 0.5, axis=1)
    return keys, inside


def _linear_index(keys: np.ndarray, dims: tuple[int, int, int]) -> np.ndarray:
    return (keys[:, 0] * dims[1] + keys[:, 1]) * dims[2] + keys[:, 2]


def _check_structure(traj: Trajectory, scenario: Scenario, out: list[dict]) -> None:
    profile = {p.id: p for p in scenario.fleet}[traj.uav_id]
    pts = traj.points
    if len(pts) < 2:
        out.append({"uav_id": traj.uav_id, "problem": "trajectory has fewer than two points"})
        return
    if pts[0][0] != profile.hub or pts[-1][0] != profile.hub:
        out.append({"uav_id": traj.uav_id, "problem": "endpoints are not the hub vertex"})
    for k in range(1, len(pts)):
        if pts[k][1] <= pts[k - 1][1]:
            out.append(
                {
                    "uav_id": traj.uav_id,
                    "problem": f"times not strictly increasing at index {k}",
                }
            )
            break
    first_at_delivery = None
    for k, (v, _) in enumerate(pts):
        if v == profile.delivery:
            first_at_delivery = k
            break
    if first_at_delivery is None:
        out.append({"uav_id": traj.uav_id, "problem": "delivery vertex never reached"})
        return
    k = first_at_delivery
    while k + 1 < len(pts) and pts[k + 1][0] == profile.delivery:
        k += 1
    dwell = pts[k][1] - pts[first_at_delivery][1]
    if dwell + _EPS < scenario.params.wait:
        out.append(
            {
                "uav_id": traj.uav_id,
                "problem": (
                    f"on-site dwell lasts {dwell:.3f} s, required {scenario.params.wait:.3f} s"
                ),
            }
        )


def validate_solution(
    scenario: Scenario, paths: Iterable[Trajectory], dt: float = 0.01
) -> ValidationReport:
    """Check a solution at time resolution dt; empty report means valid.

    Zone compliance applies everywhere except each vehicle's own hub and
    delivery voxels; separation must hold between every pair at every
    sampled instant; every trajectory must be a structurally well-formed
    roundtrip. Unknown vehicle ids are an input error.
    """
    if dt <= 0:
        raise ScenarioError("sampling step dt must be positive")
    report = ValidationReport(dt=dt)
    trajs = list(paths)
    known = {p.id for p in scenario.fleet}
    for t in trajs:
        if t.uav_id not in known:
            raise ScenarioError(f"solution references unknown uav id {t.uav_id!r}")
    profiles = {p.id: p for p in scenario.fleet}

    samples: dict[str, tuple[np.ndarray, np.ndarray]] = {}
    for t in trajs:
        _check_structure(t, scenario, report.structural_violations)
        samples[t.uav_id] = _sample(t, dt)

    dims = scenario.grid.dims
    for t in trajs:
        profile = profiles[t.uav_id]
        ts, pos = samples[t.uav_id]
        if len(ts) == 0:
            continue
        keys, inside = _voxel_keys(pos)
        lin = _linear_index(keys, dims)
        hub_idx = _linear_index(np.array([profile.hub]), dims)[0]
        del_idx = _linear_index(np.array([profile.delivery]), dims)[0]
        exempt = (lin == hub_idx) | (lin == del_idx)
        for zone in scenario.nfzs:
            active = (ts >= zone.t_start) & (ts < zone.t_end) & inside & ~exempt
            if not active.any():
                continue
            region_lin = np.fromiter(
                ((v[0] * dims[1] + v[1]) * dims[2] + v[2] for v in zone.region),
                dtype=np.int64,
                count=len(zone.region),
            )
            offending = active & np.isin(lin, region_lin)
            for idx in np.nonzero(offending)[0]:
                report.nfz_violations.append(
                    {
                        "uav_id": t.uav_id,
                        "time": float(ts[idx]),
                        "voxel": [int(c) for c in keys[idx]],
                    }
                )

    ids = sorted(samples)
    for i in range(len(ids)):
        for j in range(i + 1, len(ids)):
            a, b = ids[i], ids[j]
            ta, pa = samples[a]
            tb, pb = samples[b]
            if len(ta) == 0 or len(tb) == 0 or ta[-1] < tb[0] or tb[-1] < ta[0]:
                continue
            lo = max(ta[0], tb[0])
            hi = min(ta[-1], tb[-1])
            ia0 = int(round((lo - ta[0]) / dt))
            ib0 = int(round((lo - tb[0]) / dt))
            n = int(round((hi - lo) / dt)) + 1
            sa = pa[ia0 : ia0 + n]
            sb = pb[ib0 : ib0 + n]
            n = min(len(sa), len(sb))
            sa, sb = sa[:n], sb[:n]
            thresh = profiles[a].radius + profiles[b].radius + scenario.params.gamma
            d2 = np.sum((sa - sb) ** 2, axis=1)
            bad = np.nonzero(d2 <= thresh * thresh)[0]
            if bad.size == 0:
                continue
            times_common = lo + np.arange(n) * dt
            for idx in bad:
                report.separation_violations.append(
                    {
                        "uav_a": a,
                        "uav_b": b,
                        "time": float(times_common[idx]),
                        "distance": float(math.sqrt(d2[idx])),
                        "threshold": thresh,
                    }
                )
            worst = int(bad[np.argmin(d2[bad])])
            prev = max(worst - 1, 0)
            nxt = min(worst + 1, n - 1)
            span = times_common[nxt] - times_common[prev]
            va = (sa[nxt] - sa[prev]) / span if span > 0 else np.zeros(3)
            vb = (sb[nxt] - sb[prev]) / span if span > 0 else np.zeros(3)
            report.conflict_records.append(
                {
                    "uav_a": a,
                    "uav_b": b,
                    "time": float(times_common[worst]),
                    "distance": float(math.sqrt(d2[worst])),
                    "kind": _classify(va, vb),
                }
            )
    return report


def _classify(va: np.ndarray, vb: np.ndarray, cone_deg: float = 30.0) -> str:
    """Finite-difference twin of the conflict taxonomy used in reports."""
    na = float(np.linalg.norm(va))
    nb = float(np.linalg.norm(vb))
    if na < _EPS or nb < _EPS:
        return "intersection"
    dot = float(np.dot(va, vb)) / (na * nb)
    cone = math.cos(math.radians(cone_deg))
    if dot > cone:
        return "pursuit"
    if dot < -cone:
        return "head-on"
    return "intersection"
