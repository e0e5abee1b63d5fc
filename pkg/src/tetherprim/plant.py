"""First-order kinematic plant standing in for the tethered vehicle.

The vehicle is assumed to track commanded tether rates through a per-channel
first-order lag with saturation. Integration is explicit Euler at a fixed step.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from tetherprim.geometry import HALF_PI, ControlCommand, TetherState, wrap_angle

ELEVATION_LIMIT = HALF_PI - 1e-6
MIN_SENSED_LENGTH = 1e-6


@dataclass(frozen=True)
class PlantParams:
    max_rate: tuple[float, float, float] = (1.0, 1.0, 1.0)
    actuator_tau: float = 0.15
    noise_std: tuple[float, float, float] = (0.0, 0.0, 0.0)
    length_min: float = 0.3
    length_max: float = 10.0
    dt: float = 0.01
    seed: int = 0

    def __post_init__(self):
        if self.dt <= 0.0:
            raise ValueError("dt must be positive")
        if len(self.max_rate) != 3 or min(self.max_rate) <= 0.0:
            raise ValueError("max_rate needs three positive components")
        if self.actuator_tau < 0.0:
            raise ValueError("actuator_tau must be non-negative")
        if len(self.noise_std) != 3 or min(self.noise_std) < 0.0:
            raise ValueError("noise_std needs three non-negative components")
        if not 0.0 < self.length_min < self.length_max:
            raise ValueError("need 0 < length_min < length_max")
        if self.seed < 0:
            raise ValueError("seed must be non-negative")


@dataclass(frozen=True)
class PlantState:
    """True configuration, lagged achieved rate, and the noise generator.

    ``rng`` is advanced in place by :func:`sense`; build a fresh state with
    :func:`initial_plant_state` for every independent run.
    """

    true_state: TetherState
    achieved_rate: ControlCommand = ControlCommand(0.0, 0.0, 0.0)
    rng: np.random.Generator = field(default_factory=lambda: np.random.default_rng(0), compare=False)


def initial_plant_state(initial: TetherState, params: PlantParams) -> PlantState:
    return PlantState(true_state=initial, rng=np.random.default_rng(params.seed))


def _clamp(value: float, low: float, high: float) -> float:
    return low if value < low else high if value > high else value


def plant_step(state: PlantState, cmd: ControlCommand, params: PlantParams) -> PlantState:
    """Advance the plant by one ``dt`` under command ``cmd``.

    Saturates the command, applies the actuator lag (a jump when ``tau == 0``),
    Euler-integrates the achieved rate, then clamps length and elevation and
    wraps azimuth.
    """
    dt, tau = params.dt, params.actuator_tau
    clamped = [_clamp(c, -m, m) for c, m in zip(cmd, params.max_rate)]
    if tau == 0.0:
        achieved = clamped
    else:
        gain = min(1.0, dt / tau)
        # re-clamp: the convex update can overshoot the limit by an ulp
        achieved = [
            _clamp(a + (c - a) * gain, -m, m)
            for a, c, m in zip(state.achieved_rate, clamped, params.max_rate)
        ]

    length, elevation, azimuth = state.true_state
    length = _clamp(length + achieved[0] * dt, params.length_min, params.length_max)
    elevation = _clamp(elevation + achieved[1] * dt, -ELEVATION_LIMIT, ELEVATION_LIMIT)
    azimuth = wrap_angle(azimuth + achieved[2] * dt)
    return replace(
        state,
        true_state=TetherState(length, elevation, azimuth),
        achieved_rate=ControlCommand(*achieved),
    )


def sense(state: PlantState, params: PlantParams) -> tuple[TetherState, PlantState]:
    """Noisy tether feedback: true state plus independent Gaussian noise per channel."""
    noise = state.rng.normal(0.0, params.noise_std)
    length, elevation, azimuth = state.true_state
    sensed = TetherState(
        max(MIN_SENSED_LENGTH, length + float(noise[0])),
        _clamp(elevation + float(noise[1]), -ELEVATION_LIMIT, ELEVATION_LIMIT),
        wrap_angle(azimuth + float(noise[2])),
    )
    return sensed, state
