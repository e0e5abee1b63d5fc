"""Scenario files: YAML configuration for benchmark runs.

Angles are given in degrees in the file and converted to radians here; nothing
past this module sees degrees.
"""

from __future__ import annotations

import math
from pathlib import Path
from typing import Literal, Optional, Union

import yaml
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from tetherprim.controllers import CompositeParams, PdGains, VelocityControllerParams
from tetherprim.errors import ConfigError
from tetherprim.executor import (
    DEFAULT_ACCEPTANCE_RADIUS,
    DEFAULT_TIMEOUT,
    ControllerConfig,
    PositionControllerConfig,
    densify_path,
)
from tetherprim.geometry import CartesianPoint, TetherState, cartesian_to_tether, check_state, wrap_angle
from tetherprim.metrics import DEFAULT_RESAMPLE_INTERVAL
from tetherprim.plant import PlantParams

DEFAULT_INTERVALS = (0.2, 0.5, 1.0, 1.5, 3.0)

Vec3 = tuple[float, float, float]


def builtin_experiment1(
    start: Vec3 = (3.0, 1.0, 1.5), leg_length: float = 3.0, climb: float = 1.0
) -> list[CartesianPoint]:
    """Horizontal leg, 90 degree turn in the horizontal plane, then an ascending leg.

    The first leg runs along -z and the second along -x, both ``leg_length``
    long in horizontal projection; the second rises by ``climb``.
    """
    if leg_length <= 0.0:
        raise ValueError("leg_length must be positive")
    sx, sy, sz = start
    turn = (sx, sy, sz - leg_length)
    end = (sx - leg_length, sy + climb, sz - leg_length)
    return [CartesianPoint(*start), CartesianPoint(*turn), CartesianPoint(*end)]


def builtin_experiment2(altitude: float = 1.0, half_span: float = 1.5) -> list[CartesianPoint]:
    """Level straight line from the first to the third quadrant, directly over the reel.

    Each corner is ``half_span`` from the vertical axis (horizontally), so the
    midpoint of the segment is the singular overhead point.
    """
    if altitude <= 0.0 or half_span <= 0.0:
        raise ValueError("altitude and half_span must be positive")
    h = half_span / math.sqrt(2.0)
    return [CartesianPoint(h, altitude, h), CartesianPoint(-h, altitude, -h)]


class _Model(BaseModel):
    model_config = ConfigDict(extra="forbid")


class PathConfig(_Model):
    builtin: Optional[Literal["experiment1", "experiment2"]] = None
    corners: Optional[list[Vec3]] = None
    # experiment1 geometry
    start: Vec3 = (3.0, 1.0, 1.5)
    leg_length: float = Field(3.0, gt=0)
    climb: float = 1.0
    # experiment2 geometry
    altitude: float = Field(1.0, gt=0)
    half_span: float = Field(1.5, gt=0)

    @model_validator(mode="after")
    def _one_source(self):
        if (self.builtin is None) == (self.corners is None):
            raise ValueError("give exactly one of 'builtin' or 'corners'")
        if self.corners is not None and len(self.corners) < 2:
            raise ValueError("'corners' needs at least two points")
        return self

    def corner_points(self) -> list[CartesianPoint]:
        if self.builtin == "experiment1":
            return builtin_experiment1(self.start, self.leg_length, self.climb)
        if self.builtin == "experiment2":
            return builtin_experiment2(self.altitude, self.half_span)
        return [CartesianPoint(*c) for c in self.corners]


class PositionConfig(_Model):
    kp: Vec3 = (0.8, 0.8, 0.8)
    kd: Vec3 = (0.1, 0.1, 0.1)
    derivative_filter_alpha: float = Field(0.7, ge=0, le=1)


class VelocityConfig(_Model):
    alpha: float = Field(0.5, gt=0)
    singularity_eps: float = Field(0.05, gt=0, lt=1)
    arrival_slowdown_radius: float = Field(0.2, ge=0)


class CompositeConfig(_Model):
    enter_elevation_deg: float = Field(87.0, gt=0, lt=90)
    exit_elevation_deg: float = Field(80.0, gt=0, lt=90)

    @model_validator(mode="after")
    def _band(self):
        if self.exit_elevation_deg >= self.enter_elevation_deg:
            raise ValueError("exit_elevation_deg must be below enter_elevation_deg")
        return self


class ChannelTriple(_Model):
    """Per-channel values: length in meters, angles in degrees."""

    length: float = Field(ge=0)
    elevation_deg: float = Field(ge=0)
    azimuth_deg: float = Field(ge=0)

    def to_si(self) -> Vec3:
        return (self.length, math.radians(self.elevation_deg), math.radians(self.azimuth_deg))


class PlantConfig(_Model):
    max_rate: ChannelTriple = ChannelTriple(
        length=1.0, elevation_deg=math.degrees(1.0), azimuth_deg=math.degrees(1.0)
    )
    actuator_tau: float = Field(0.15, ge=0)
    noise_std: ChannelTriple = ChannelTriple(length=0.0, elevation_deg=0.0, azimuth_deg=0.0)
    length_min: float = Field(0.3, gt=0)
    length_max: float = 10.0
    dt: float = Field(0.01, gt=0)

    @model_validator(mode="after")
    def _limits(self):
        if self.length_max <= self.length_min:
            raise ValueError("length_max must exceed length_min")
        if min(self.max_rate.to_si()) <= 0.0:
            raise ValueError("max_rate components must be positive")
        return self


class InitialStateConfig(_Model):
    length: float = Field(gt=0)
    elevation_deg: float = Field(gt=-90, le=90)
    azimuth_deg: float


ControllerName = Literal["position", "velocity", "composite"]


class ScenarioSpec(_Model):
    name: str = Field(pattern=r"^[A-Za-z0-9_.-]+$")
    path: PathConfig
    intervals: list[float] = Field(default_factory=lambda: list(DEFAULT_INTERVALS), min_length=1)
    controllers: list[ControllerName] = Field(default_factory=lambda: ["position", "velocity"], min_length=1)
    position: PositionConfig = PositionConfig()
    velocity: VelocityConfig = VelocityConfig()
    composite: CompositeConfig = CompositeConfig()
    plant: PlantConfig = PlantConfig()
    initial_state: Optional[InitialStateConfig] = None
    trials: int = Field(3, ge=1)
    base_seed: int = Field(0, ge=0)
    acceptance_radius: float = Field(DEFAULT_ACCEPTANCE_RADIUS, gt=0)
    timeout: float = Field(DEFAULT_TIMEOUT, gt=0)
    resample_interval: float = Field(DEFAULT_RESAMPLE_INTERVAL, gt=0)

    @field_validator("intervals", "controllers", mode="before")
    @classmethod
    def _scalar_to_list(cls, value):
        return value if isinstance(value, list) else [value]

    @field_validator("intervals")
    @classmethod
    def _positive_intervals(cls, value):
        if any(v <= 0 for v in value):
            raise ValueError("intervals must be positive")
        if len(set(value)) != len(value):
            raise ValueError("intervals must be distinct")
        return value

    @field_validator("controllers")
    @classmethod
    def _distinct_controllers(cls, value):
        if len(set(value)) != len(value):
            raise ValueError("controllers must be distinct")
        return value

    # Conversions to core types

    def corners(self) -> list[CartesianPoint]:
        return self.path.corner_points()

    def initial_tether_state(self) -> TetherState:
        if self.initial_state is None:
            return cartesian_to_tether(self.corners()[0])
        s = self.initial_state
        return check_state(
            TetherState(s.length, math.radians(s.elevation_deg), wrap_angle(math.radians(s.azimuth_deg)))
        )

    def plant_params(self, seed: int) -> PlantParams:
        p = self.plant
        return PlantParams(
            max_rate=p.max_rate.to_si(),
            actuator_tau=p.actuator_tau,
            noise_std=p.noise_std.to_si(),
            length_min=p.length_min,
            length_max=p.length_max,
            dt=p.dt,
            seed=seed,
        )

    def controller_config(self, kind: str) -> ControllerConfig:
        gains = PdGains(tuple(self.position.kp), tuple(self.position.kd))
        velocity = VelocityControllerParams(
            self.velocity.alpha, self.velocity.singularity_eps, self.velocity.arrival_slowdown_radius
        )
        if kind == "position":
            return PositionControllerConfig(gains, self.position.derivative_filter_alpha)
        if kind == "velocity":
            return velocity
        if kind == "composite":
            return CompositeParams(
                velocity=velocity,
                position=gains,
                derivative_filter_alpha=self.position.derivative_filter_alpha,
                enter_position_margin=math.cos(math.radians(self.composite.enter_elevation_deg)),
                exit_position_margin=math.cos(math.radians(self.composite.exit_elevation_deg)),
            )
        raise ValueError(f"unknown controller kind {kind!r}")


def _format_validation_error(exc: ValidationError) -> str:
    lines = []
    for err in exc.errors():
        loc = ".".join(str(part) for part in err["loc"]) or "<root>"
        lines.append(f"  {loc}: {err['msg']}")
    return "invalid scenario:\n" + "\n".join(lines)


def parse_spec(data: Union[dict, None], source: str = "<spec>") -> ScenarioSpec:
    """Validate a mapping into a :class:`ScenarioSpec`, checking cross-field invariants."""
    if not isinstance(data, dict):
        raise ConfigError(f"{source}: top level must be a mapping")
    try:
        spec = ScenarioSpec.model_validate(data)
    except ValidationError as exc:
        raise ConfigError(f"{source}: {_format_validation_error(exc)}") from exc
    # Exercise every conversion so bad combinations fail before any trial runs.
    try:
        for kind in spec.controllers:
            spec.controller_config(kind)
        spec.plant_params(spec.base_seed)
        corners = spec.corners()
        if any(tuple(c) == (0.0, 0.0, 0.0) for c in corners):
            raise ValueError("path.corners: a corner sits at the reel center")
        for interval in spec.intervals:
            densify_path(corners, interval, spec.acceptance_radius)
        spec.initial_tether_state()
    except (ValueError, ConfigError) as exc:
        raise ConfigError(f"{source}: invalid scenario: {exc}") from exc
    return spec


def load_spec(path: Union[str, Path]) -> ScenarioSpec:
    """Read and validate a YAML scenario file.

    Raises:
        ConfigError: on YAML syntax errors (with line and column) or invalid fields.
        OSError: if the file cannot be read.
    """
    path = Path(path)
    text = path.read_text()
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        where = f"{path}:{mark.line + 1}:{mark.column + 1}" if mark else str(path)
        problem = getattr(exc, "problem", None) or str(exc)
        raise ConfigError(f"{where}: YAML syntax error: {problem}") from exc
    return parse_spec(data, str(path))
