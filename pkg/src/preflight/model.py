"""Fleet, trajectory, and solver-configuration records."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .errors import ScenarioError
from .grid import Voxel


@dataclass(frozen=True)
class UavProfile:
    """One mission request: hub, delivery target, schedule, and airframe size."""

    id: str
    hub: Voxel
    delivery: Voxel
    t_init: float
    speed: float
    radius: float

    def __post_init__(self) -> None:
        if self.hub == self.delivery:
            raise ScenarioError(f"uav {self.id}: hub and delivery must differ")
        if self.t_init <= 0:
            raise ScenarioError(f"uav {self.id}: t_init must be > 0")
        if self.speed <= 0:
            raise ScenarioError(f"uav {self.id}: speed must be > 0")
        if self.radius <= 0:
            raise ScenarioError(f"uav {self.id}: radius must be > 0")


@dataclass
class Trajectory:
    """A timestamped roundtrip: hub -> delivery, on-site dwell, -> hub.

    `points` are (voxel, time) tuples with strictly increasing times;
    positions between points are linear interpolation, and the vehicle is
    absent from the airspace before the first and after the last point.
    `outbound_index` is the first index at the delivery voxel and
    `wait_steps` the number of repeated delivery tuples that follow it.
    """

    uav_id: str
    points: list[tuple[Voxel, float]]
    outbound_index: int
    wait_steps: int
    radius: float

    @property
    def t_start(self) -> float:
        return self.points[0][1]

    @property
    def t_end(self) -> float:
        return self.points[-1][1]

    @property
    def duration(self) -> float:
        return self.t_end - self.t_start

    @cached_property
    def arrays(self) -> tuple[np.ndarray, np.ndarray]:
        """(times, xyz) float64 arrays for the conflict kernels; cached."""
        times = np.array([t for _, t in self.points], dtype=np.float64)
        coords = np.array([v for v, _ in self.points], dtype=np.float64)
        return times, coords


@dataclass(frozen=True)
class SolverParams:
    """Knobs shared by the solvers and the scenario generator."""

    gamma: float = 0.5
    wait: float = 10.0
    neighborhood: int = 10
    time_limit: float = 300.0
    seed: int = 0
    pruning: bool = True
    soft_mode: str = "soft"

    def __post_init__(self) -> None:
        if self.neighborhood < 2:
            raise ScenarioError("neighborhood size must be >= 2")
        if self.time_limit <= 0:
            raise ScenarioError("time limit must be > 0")
        if self.soft_mode not in ("soft", "hard"):
            raise ScenarioError(f"soft_mode must be 'soft' or 'hard', got {self.soft_mode!r}")


@dataclass
class SolveResult:
    """Outcome of a multi-agent solve call."""

    status: str  # success | failure | timeout
    paths: dict[str, Trajectory] = field(default_factory=dict)
    flowtime: float = 0.0
    iterations: int = 0
    conflict_history: list[int] = field(default_factory=list)
    wall_time: float = 0.0
    expanded_nodes: int = 0

    @property
    def success(self) -> bool:
        return self.status == "success"
