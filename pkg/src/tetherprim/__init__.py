"""Tether-based motion primitives for a tethered UAV, with a desk-scale simulator."""

from tetherprim.errors import (
    CoincidentTarget,
    ConfigError,
    InvalidState,
    NearSingular,
    NonDivisibleSegment,
    TetherPrimError,
    TooShort,
    ZeroRadius,
)
from tetherprim.geometry import (
    CartesianPoint,
    CartesianVelocity,
    ControlCommand,
    TetherState,
    cartesian_to_tether,
    jacobian,
    jacobian_determinant,
    singularity_margin,
    solve_velocity,
    tether_to_cartesian,
)

__version__ = "0.1.0"

__all__ = [
    "CartesianPoint",
    "CartesianVelocity",
    "CoincidentTarget",
    "ConfigError",
    "ControlCommand",
    "InvalidState",
    "NearSingular",
    "NonDivisibleSegment",
    "TetherPrimError",
    "TetherState",
    "TooShort",
    "ZeroRadius",
    "cartesian_to_tether",
    "jacobian",
    "jacobian_determinant",
    "singularity_margin",
    "solve_velocity",
    "tether_to_cartesian",
]
