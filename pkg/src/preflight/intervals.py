"""Per-voxel safe time windows combining static obstacles and timed no-fly zones.

A voxel's safe intervals are the maximal half-open windows [start, end)
during which it is neither a static obstacle nor covered by an active
no-fly zone. A zone is active on [t_start, t_end): t_end is the first
safe instant again. A planner's own hub and delivery voxels are exempt
from zone restrictions and keep the full [0, inf) window.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Mapping, NamedTuple

from .errors import ContractError, ScenarioError
from .grid import GridMap, Voxel

INF = math.inf


class SafeInterval(NamedTuple):
    start: float
    end: float


FULL_WINDOW: tuple[SafeInterval, ...] = (SafeInterval(0.0, INF),)
NO_WINDOW: tuple[SafeInterval, ...] = ()


@dataclass(frozen=True)
class NoFlyZone:
    """A voxel region closed to traffic during [t_start, t_end)."""

    region: frozenset[Voxel]
    t_start: float
    t_end: float

    def __post_init__(self) -> None:
        if not self.region:
            raise ScenarioError("no-fly zone region must be non-empty")
        if not (0 <= self.t_start < self.t_end):
            raise ScenarioError(
                f"no-fly zone window [{self.t_start}, {self.t_end}) must satisfy 0 <= start < end"
            )

    def active_at(self, t: float) -> bool:
        return self.t_start <= t < self.t_end


def _merge_windows(windows: list[tuple[float, float]]) -> list[tuple[float, float]]:
    """Union of half-open windows; touching windows merge."""
    windows.sort()
    merged: list[tuple[float, float]] = []
    for s, e in windows:
        if merged and s <= merged[-1][1]:
            if e > merged[-1][1]:
                merged[-1] = (merged[-1][0], e)
        else:
            merged.append((s, e))
    return merged


def _complement(blocked: list[tuple[float, float]]) -> tuple[SafeInterval, ...]:
    """Maximal safe windows over [0, inf) left open by merged blocked windows.

    A window blocked through t=inf leaves nothing after it (a zone may be
    permanent even though generated zones never are).
    """
    out: list[SafeInterval] = []
    cursor = 0.0
    for s, e in blocked:
        if s > cursor:
            out.append(SafeInterval(cursor, s))
        cursor = max(cursor, e)
    if cursor != INF:
        out.append(SafeInterval(cursor, INF))
    return tuple(out)


def compute_blocked_windows(grid: GridMap, nfzs: Iterable[NoFlyZone]) -> dict[Voxel, tuple[SafeInterval, ...]]:
    """Safe windows for every voxel touched by at least one zone.

    Voxels absent from the result have the unrestricted [0, inf) window.
    Raises ScenarioError if any zone region leaves the grid.
    """
    raw: dict[Voxel, list[tuple[float, float]]] = {}
    for nfz in nfzs:
        for v in nfz.region:
            if not grid.in_bounds(v):
                raise ScenarioError(f"no-fly zone voxel {v} is out of bounds for dims {grid.dims}")
            raw.setdefault(v, []).append((nfz.t_start, nfz.t_end))
    return {v: _complement(_merge_windows(ws)) for v, ws in raw.items()}


@dataclass(frozen=True)
class SafeIntervalTable:
    """Safe-window lookup for one agent (its exempt vertices keep [0, inf)).

    Tables sharing the same zone set can share the precomputed window map,
    so building a per-agent table is cheap.
    """

    grid: GridMap
    windows: Mapping[Voxel, tuple[SafeInterval, ...]]
    exempt_vertices: frozenset[Voxel] = frozenset()

    def intervals_at(self, v: Voxel) -> tuple[SafeInterval, ...]:
        """Ordered, disjoint, maximal safe windows at v (empty if blocked)."""
        if v in self.grid.hard_obstacles:
            return NO_WINDOW
        if v in self.exempt_vertices:
            return FULL_WINDOW
        return self.windows.get(v, FULL_WINDOW)

    def first_safe_interval(self, v: Voxel, t: float) -> SafeInterval | None:
        """Earliest window still open at or after time t, or None."""
        for iv in self.intervals_at(v):
            if iv.end > t:
                return iv
        return None

    def next_wait_interval(self, v: Voxel, current: SafeInterval) -> SafeInterval | None:
        """The window immediately after `current` at v, or None if last.

        Raises ContractError when `current` is not a window of v.
        """
        ivs = self.intervals_at(v)
        try:
            i = ivs.index(current)
        except ValueError:
            raise ContractError(f"interval {current} is not in the table for voxel {v}") from None
        return ivs[i + 1] if i + 1 < len(ivs) else None

    def with_exempt(self, exempt: Iterable[Voxel]) -> "SafeIntervalTable":
        return SafeIntervalTable(self.grid, self.windows, frozenset(exempt))


def build_sfi_table(
    grid: GridMap, nfzs: Iterable[NoFlyZone], exempt: Iterable[Voxel] = ()
) -> SafeIntervalTable:
    """Build the safe-interval table for a grid, zone set, and exempt vertices."""
    return SafeIntervalTable(grid, compute_blocked_windows(grid, nfzs), frozenset(exempt))
