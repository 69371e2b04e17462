"""Bounded 3D voxel lattice with 26-connectivity and static obstacles.

Voxels are unit cubes (1 m edge) addressed by integer indices; voxel
centers sit on the integer lattice, so move lengths between adjacent
voxels are 1, sqrt(2) or sqrt(3) meters. All times in the package are
seconds, all distances meters.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .errors import ContractError, ScenarioError

Voxel = tuple[int, int, int]

# Lexicographic (dx, dy, dz) offsets, origin excluded. The fixed order makes
# neighbor expansion deterministic, which keeps seeded runs reproducible.
OFFSETS_26: tuple[Voxel, ...] = tuple(
    (dx, dy, dz)
    for dx in (-1, 0, 1)
    for dy in (-1, 0, 1)
    for dz in (-1, 0, 1)
    if (dx, dy, dz) != (0, 0, 0)
)

_OFFSET_LENGTH = {off: math.sqrt(off[0] ** 2 + off[1] ** 2 + off[2] ** 2) for off in OFFSETS_26}


def move_distance(a: Voxel, b: Voxel) -> float:
    """Euclidean distance in meters between centers of two adjacent voxels.

    Waiting in place (a == b) has distance 0. Raises ContractError for a
    pair that is not 26-adjacent.
    """
    if a == b:
        return 0.0
    off = (b[0] - a[0], b[1] - a[1], b[2] - a[2])
    try:
        return _OFFSET_LENGTH[off]
    except KeyError:
        raise ContractError(f"voxels {a} and {b} are not 26-adjacent") from None


@dataclass(frozen=True)
class GridMap:
    """Immutable voxel world: dimensions plus permanently blocked voxels.

    Safe to share between concurrently running planners; neighbor lookups
    are cached internally.
    """

    dims: tuple[int, int, int]
    hard_obstacles: frozenset[Voxel] = frozenset()
    _nbr_cache: dict = field(default_factory=dict, compare=False, repr=False)
    _pruned_cache: dict = field(default_factory=dict, compare=False, repr=False)

    def __post_init__(self) -> None:
        if len(self.dims) != 3 or any(d <= 0 for d in self.dims):
            raise ScenarioError(f"grid dims must be three positive integers, got {self.dims}")
        for v in self.hard_obstacles:
            if not self.in_bounds(v):
                raise ScenarioError(f"hard obstacle {v} is out of bounds for dims {self.dims}")

    @property
    def volume(self) -> int:
        return self.dims[0] * self.dims[1] * self.dims[2]

    def in_bounds(self, v: Voxel) -> bool:
        return 0 <= v[0] < self.dims[0] and 0 <= v[1] < self.dims[1] and 0 <= v[2] < self.dims[2]

    def is_hard_blocked(self, v: Voxel) -> bool:
        """True iff v is a static obstacle. v must be in bounds."""
        return v in self.hard_obstacles

    def neighbors26(self, v: Voxel) -> tuple[Voxel, ...]:
        """All in-bounds, unblocked voxels 26-adjacent to v, lexicographic by offset.

        Never contains v itself. Raises ContractError if v is out of bounds.
        """
        return tuple(n for n, _ in self.moves26(v))

    def moves26(self, v: Voxel) -> tuple[tuple[Voxel, float], ...]:
        """neighbors26 paired with metric move lengths; cached per voxel."""
        cached = self._nbr_cache.get(v)
        if cached is not None:
            return cached
        if not self.in_bounds(v):
            raise ContractError(f"voxel {v} is out of bounds for dims {self.dims}")
        x, y, z = v
        dx_max, dy_max, dz_max = self.dims
        blocked = self.hard_obstacles
        out = []
        for off in OFFSETS_26:
            n = (x + off[0], y + off[1], z + off[2])
            if 0 <= n[0] < dx_max and 0 <= n[1] < dy_max and 0 <= n[2] < dz_max and n not in blocked:
                out.append((n, _OFFSET_LENGTH[off]))
        result = tuple(out)
        self._nbr_cache[v] = result
        return result
