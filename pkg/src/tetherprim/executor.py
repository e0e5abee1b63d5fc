"""Waypoint path execution against the simulated plant."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Sequence, Union

from tetherprim.controllers import (
    CompositeParams,
    ControllerMode,
    PdGains,
    PositionControllerState,
    VelocityControllerParams,
    composite_step,
    position_step,
    velocity_step,
)
from tetherprim.errors import NearSingular, NonDivisibleSegment
from tetherprim.geometry import (
    ZERO_COMMAND,
    CartesianPoint,
    ControlCommand,
    TetherState,
    check_state,
    tether_to_cartesian,
)
from tetherprim.plant import PlantParams, initial_plant_state, plant_step, sense

DEFAULT_ACCEPTANCE_RADIUS = 0.4
DEFAULT_TIMEOUT = 120.0
_DIVISIBILITY_TOL = 1e-9


class Outcome(str, enum.Enum):
    COMPLETED = "completed"
    TIMEOUT = "timeout"
    SINGULARITY_ABORT = "singularity_abort"


@dataclass(frozen=True)
class WaypointPath:
    waypoints: tuple[CartesianPoint, ...]
    acceptance_radius: float = DEFAULT_ACCEPTANCE_RADIUS

    def __post_init__(self):
        object.__setattr__(self, "waypoints", tuple(CartesianPoint(*w) for w in self.waypoints))
        if len(self.waypoints) < 2:
            raise ValueError("a path needs at least two waypoints")
        if any(w == (0.0, 0.0, 0.0) for w in self.waypoints):
            raise ValueError("waypoints may not sit at the reel center")
        if self.acceptance_radius <= 0.0:
            raise ValueError("acceptance_radius must be positive")

    def __len__(self):
        return len(self.waypoints)


@dataclass(frozen=True)
class PositionControllerConfig:
    gains: PdGains = field(default_factory=PdGains)
    derivative_filter_alpha: float = 0.7


ControllerConfig = Union[PositionControllerConfig, VelocityControllerParams, CompositeParams]


def controller_kind(controller: ControllerConfig) -> str:
    if isinstance(controller, PositionControllerConfig):
        return "position"
    if isinstance(controller, VelocityControllerParams):
        return "velocity"
    if isinstance(controller, CompositeParams):
        return "composite"
    raise TypeError(f"unknown controller config {controller!r}")


@dataclass(frozen=True)
class TrajectorySample:
    t: float
    true_state: TetherState
    sensed_state: TetherState
    true_position: CartesianPoint
    command: ControlCommand
    active_waypoint: int
    mode: ControllerMode


@dataclass
class EpisodeResult:
    trajectory: list[TrajectorySample]
    outcome: Outcome
    elapsed: float


def _distance(a: Sequence[float], b: Sequence[float]) -> float:
    return math.sqrt(sum((p - q) ** 2 for p, q in zip(a, b)))


def run_episode(
    path: WaypointPath,
    controller: ControllerConfig,
    plant_params: PlantParams,
    initial: TetherState,
    timeout: float = DEFAULT_TIMEOUT,
) -> EpisodeResult:
    """Fly ``path`` from ``initial`` with the given controller.

    Each control step senses the plant, advances past every waypoint whose
    acceptance sphere contains the sensed position, computes a command, and
    steps the plant. Runtime anomalies become the episode outcome instead of
    exceptions.
    """
    check_state(initial)
    if timeout <= 0.0:
        raise ValueError("timeout must be positive")
    kind = controller_kind(controller)

    dt = plant_params.dt
    n_steps = int(math.floor(timeout / dt + 1e-9))
    waypoints = path.waypoints
    last = len(waypoints) - 1
    radius = path.acceptance_radius

    plant = initial_plant_state(initial, plant_params)
    if kind == "position":
        pd = PositionControllerState(controller.gains, controller.derivative_filter_alpha)
        mode = ControllerMode.POSITION
    elif kind == "velocity":
        pd = None
        mode = ControllerMode.VELOCITY
    else:
        pd = PositionControllerState(controller.position, controller.derivative_filter_alpha)
        mode = ControllerMode.VELOCITY

    trajectory: list[TrajectorySample] = []
    active = 0
    for k in range(n_steps + 1):
        t = k * dt
        sensed, plant = sense(plant, plant_params)
        position = tether_to_cartesian(sensed)
        true_state = plant.true_state

        def record(command: ControlCommand) -> None:
            trajectory.append(
                TrajectorySample(
                    t, true_state, sensed, tether_to_cartesian(true_state), command, active, mode
                )
            )

        advanced = False
        while active <= last and _distance(position, waypoints[active]) <= radius:
            active += 1
            advanced = True
        if active > last:
            active = last
            record(ZERO_COMMAND)
            return EpisodeResult(trajectory, Outcome.COMPLETED, t)
        if k == n_steps:
            record(ZERO_COMMAND)
            return EpisodeResult(trajectory, Outcome.TIMEOUT, t)
        if advanced and pd is not None:
            pd = pd.reset()

        target = waypoints[active]
        is_final = active == last
        if kind == "position":
            command, pd = position_step(pd, target, sensed, dt)
        elif kind == "velocity":
            try:
                command = velocity_step(controller, target, sensed, is_final)
            except NearSingular:
                record(ZERO_COMMAND)
                return EpisodeResult(trajectory, Outcome.SINGULARITY_ABORT, t)
        else:
            command, mode, pd = composite_step(controller, mode, pd, target, sensed, dt, is_final)
        record(command)
        plant = plant_step(plant, command, plant_params)

    raise AssertionError("unreachable")


def _horizontal_length(a: CartesianPoint, b: CartesianPoint) -> float:
    return math.hypot(b.x - a.x, b.z - a.z)


def densify_path(
    corners: Sequence[Sequence[float]],
    horizontal_interval: float,
    acceptance_radius: float = DEFAULT_ACCEPTANCE_RADIUS,
) -> WaypointPath:
    """Insert waypoints along each segment, spaced by horizontal projection.

    Every segment's horizontal (x-z) length must be a whole multiple of
    ``horizontal_interval``; the corners appear exactly once in the output.

    Raises:
        NonDivisibleSegment: if some segment does not divide evenly.
    """
    if horizontal_interval <= 0.0:
        raise ValueError("horizontal_interval must be positive")
    points = [CartesianPoint(*map(float, c)) for c in corners]
    if len(points) < 2:
        raise ValueError("need at least two corners")

    waypoints = [points[0]]
    for i, (a, b) in enumerate(zip(points, points[1:])):
        h = _horizontal_length(a, b)
        if h == 0.0:
            raise ValueError(f"segment {i} has no horizontal extent")
        ratio = h / horizontal_interval
        n = round(ratio)
        if n < 1 or abs(ratio - n) > _DIVISIBILITY_TOL * max(1.0, ratio):
            raise NonDivisibleSegment(
                f"segment {i} horizontal length {h:.6g} m is not a multiple of {horizontal_interval} m"
            )
        for j in range(1, n):
            f = j / n
            waypoints.append(CartesianPoint(*(p + (q - p) * f for p, q in zip(a, b))))
        waypoints.append(b)
    return WaypointPath(tuple(waypoints), acceptance_radius)
