"""Position (independent PD) and velocity (inverse Jacobian) motion primitives.

Controllers are plain values: every step function takes the controller state
explicitly and returns the updated state alongside the command.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, replace
from typing import NamedTuple

from tetherprim.errors import CoincidentTarget, NearSingular
from tetherprim.geometry import (
    DEFAULT_SINGULARITY_EPS,
    CartesianPoint,
    CartesianVelocity,
    ControlCommand,
    TetherState,
    cartesian_to_tether,
    singularity_margin,
    solve_velocity,
    tether_to_cartesian,
    wrap_angle,
)

COINCIDENT_DISTANCE = 1e-9


class ControllerMode(str, enum.Enum):
    POSITION = "position"
    VELOCITY = "velocity"


class TetherError(NamedTuple):
    """Desired minus sensed tether configuration, azimuth wrapped to (-pi, pi]."""

    length: float
    elevation: float
    azimuth: float


ZERO_ERROR = TetherError(0.0, 0.0, 0.0)


@dataclass(frozen=True)
class PdGains:
    kp: tuple[float, float, float] = (0.8, 0.8, 0.8)
    kd: tuple[float, float, float] = (0.1, 0.1, 0.1)

    def __post_init__(self):
        if len(self.kp) != 3 or len(self.kd) != 3:
            raise ValueError("kp and kd need one gain per channel (L, theta, phi)")
        if min(self.kp) < 0.0 or min(self.kd) < 0.0:
            raise ValueError("PD gains must be non-negative")
        if max(self.kp) <= 0.0:
            raise ValueError("at least one proportional gain must be positive")


@dataclass(frozen=True)
class PositionControllerState:
    gains: PdGains = field(default_factory=PdGains)
    derivative_filter_alpha: float = 0.7
    previous_error: TetherError | None = None
    previous_derivative: TetherError = ZERO_ERROR

    def __post_init__(self):
        if not 0.0 <= self.derivative_filter_alpha <= 1.0:
            raise ValueError("derivative_filter_alpha must lie in [0, 1]")

    def reset(self) -> PositionControllerState:
        return replace(self, previous_error=None, previous_derivative=ZERO_ERROR)


@dataclass(frozen=True)
class VelocityControllerParams:
    alpha: float = 0.5
    singularity_eps: float = DEFAULT_SINGULARITY_EPS
    arrival_slowdown_radius: float = 0.2

    def __post_init__(self):
        if self.alpha <= 0.0:
            raise ValueError("alpha must be positive")
        if not 0.0 < self.singularity_eps < 1.0:
            raise ValueError("singularity_eps must lie in (0, 1)")
        if self.arrival_slowdown_radius < 0.0:
            raise ValueError("arrival_slowdown_radius must be non-negative")


@dataclass(frozen=True)
class CompositeParams:
    velocity: VelocityControllerParams = field(default_factory=VelocityControllerParams)
    position: PdGains = field(default_factory=PdGains)
    derivative_filter_alpha: float = 0.7
    enter_position_margin: float = math.cos(math.radians(87.0))
    exit_position_margin: float = math.cos(math.radians(80.0))

    def __post_init__(self):
        if not 0.0 < self.enter_position_margin < self.exit_position_margin < 1.0:
            raise ValueError("need 0 < enter_position_margin < exit_position_margin < 1")
        if self.velocity.singularity_eps >= self.enter_position_margin:
            raise ValueError(
                "velocity singularity_eps must be below enter_position_margin, "
                "otherwise velocity control would fail before the switch"
            )


def tether_error(desired: TetherState, sensed: TetherState) -> TetherError:
    return TetherError(
        desired.length - sensed.length,
        desired.elevation - sensed.elevation,
        wrap_angle(desired.azimuth - sensed.azimuth),
    )


def position_step(
    state: PositionControllerState,
    waypoint: CartesianPoint,
    sensed: TetherState,
    dt: float,
) -> tuple[ControlCommand, PositionControllerState]:
    """One step of three independent PD loops on ``(L, theta, phi)``.

    The derivative is a backward difference of the error passed through a
    first-order low-pass filter; it is zero on the first step after a reset.
    Channels never interact, so a waypoint at the current tether length
    produces no length command.
    """
    if dt <= 0.0:
        raise ValueError(f"dt must be positive, got {dt}")
    error = tether_error(cartesian_to_tether(waypoint), sensed)

    if state.previous_error is None:
        derivative = ZERO_ERROR
    else:
        prev = state.previous_error
        raw = (
            (error.length - prev.length) / dt,
            (error.elevation - prev.elevation) / dt,
            wrap_angle(error.azimuth - prev.azimuth) / dt,
        )
        a = state.derivative_filter_alpha
        derivative = TetherError(
            *(a * d_prev + (1.0 - a) * d for d_prev, d in zip(state.previous_derivative, raw))
        )

    kp, kd = state.gains.kp, state.gains.kd
    command = ControlCommand(*(p * e + d * de for p, d, e, de in zip(kp, kd, error, derivative)))
    return command, replace(state, previous_error=error, previous_derivative=derivative)


def desired_velocity(
    params: VelocityControllerParams,
    waypoint: CartesianPoint,
    position: CartesianPoint,
    is_final: bool = False,
) -> CartesianVelocity:
    """Velocity of magnitude ``alpha`` pointing from ``position`` to ``waypoint``.

    On the final waypoint the speed ramps down linearly inside
    ``arrival_slowdown_radius``.
    """
    delta = [w - p for w, p in zip(waypoint, position)]
    distance = math.sqrt(sum(d * d for d in delta))
    if distance < COINCIDENT_DISTANCE:
        raise CoincidentTarget(f"target is {distance:.3g} m from the current position")
    speed = params.alpha
    if is_final and distance < params.arrival_slowdown_radius:
        speed *= distance / params.arrival_slowdown_radius
    scale = speed / distance
    return CartesianVelocity(*(d * scale for d in delta))


def velocity_step(
    params: VelocityControllerParams,
    waypoint: CartesianPoint,
    sensed: TetherState,
    is_final: bool = False,
) -> ControlCommand:
    """Inverse-Jacobian rates that move straight toward ``waypoint`` at speed ``alpha``.

    Raises:
        NearSingular: when the sensed elevation is too close to vertical.
        CoincidentTarget: when the waypoint is (numerically) the current position.
    """
    v = desired_velocity(params, waypoint, tether_to_cartesian(sensed), is_final)
    return solve_velocity(sensed, v, params.singularity_eps)


def composite_step(
    params: CompositeParams,
    mode: ControllerMode,
    pd_state: PositionControllerState,
    waypoint: CartesianPoint,
    sensed: TetherState,
    dt: float,
    is_final: bool = False,
) -> tuple[ControlCommand, ControllerMode, PositionControllerState]:
    """Velocity control with hysteretic fallback to position control near vertical.

    Switches to position control when ``cos(theta)`` drops below
    ``enter_position_margin`` and back once it rises above
    ``exit_position_margin``. Entering position mode resets the PD state.
    """
    margin = singularity_margin(sensed)
    if mode is ControllerMode.VELOCITY and margin < params.enter_position_margin:
        mode = ControllerMode.POSITION
        pd_state = pd_state.reset()
    elif mode is ControllerMode.POSITION and margin > params.exit_position_margin:
        mode = ControllerMode.VELOCITY

    if mode is ControllerMode.VELOCITY:
        try:
            return velocity_step(params.velocity, waypoint, sensed, is_final), mode, pd_state
        except NearSingular:
            # unreachable with validated params; kept so the composite never aborts
            mode = ControllerMode.POSITION
            pd_state = pd_state.reset()
    command, pd_state = position_step(pd_state, waypoint, sensed, dt)
    return command, mode, pd_state
