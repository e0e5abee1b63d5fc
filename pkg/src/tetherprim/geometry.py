"""Tether-coordinate geometry.

The reel sits at the origin. ``y`` is the vertical axis and ``x``-``z`` is the
horizontal plane. A tether configuration ``(L, theta, phi)`` is the tether
length, the elevation above the horizontal plane, and the azimuth about the
vertical axis, measured from ``+z`` toward ``+x``.
"""

from __future__ import annotations

import math
from typing import NamedTuple

import numpy as np

from tetherprim.errors import InvalidState, NearSingular, ZeroRadius

HALF_PI = 0.5 * math.pi

#: Default threshold on cos(elevation) below which velocity solves are refused.
DEFAULT_SINGULARITY_EPS = 0.05


class TetherState(NamedTuple):
    """Tether configuration: length [m], elevation [rad], azimuth [rad]."""

    length: float
    elevation: float
    azimuth: float


class CartesianPoint(NamedTuple):
    x: float
    y: float
    z: float


class CartesianVelocity(NamedTuple):
    vx: float
    vy: float
    vz: float


class ControlCommand(NamedTuple):
    """Commanded tether rates: length [m/s], elevation [rad/s], azimuth [rad/s]."""

    length_rate: float
    elevation_rate: float
    azimuth_rate: float


ZERO_COMMAND = ControlCommand(0.0, 0.0, 0.0)


def wrap_angle(angle: float) -> float:
    """Wrap an angle into (-pi, pi]."""
    wrapped = math.remainder(angle, 2.0 * math.pi)
    if wrapped <= -math.pi:
        wrapped += 2.0 * math.pi
    return wrapped


def check_state(s: TetherState) -> TetherState:
    """Raise :class:`InvalidState` unless ``s`` is a valid tether configuration."""
    length, elevation, azimuth = s
    if not all(math.isfinite(v) for v in s):
        raise InvalidState(f"non-finite tether state {tuple(s)}")
    if length <= 0.0:
        raise InvalidState(f"tether length must be positive, got {length}")
    if not -HALF_PI < elevation <= HALF_PI:
        raise InvalidState(f"elevation {elevation} outside (-pi/2, pi/2]")
    if not -math.pi < azimuth <= math.pi:
        raise InvalidState(f"azimuth {azimuth} outside (-pi, pi]")
    return s


def tether_to_cartesian(s: TetherState) -> CartesianPoint:
    length, elevation, azimuth = s
    horizontal = length * math.cos(elevation)
    return CartesianPoint(
        horizontal * math.sin(azimuth),
        length * math.sin(elevation),
        horizontal * math.cos(azimuth),
    )


def cartesian_to_tether(p: CartesianPoint) -> TetherState:
    """Inverse of :func:`tether_to_cartesian`.

    The azimuth uses the two-argument ``atan2(x, z)`` so all four quadrants of
    the horizontal plane are distinguished.

    Raises:
        ZeroRadius: if ``p`` is the reel center.
    """
    x, y, z = p
    length = math.sqrt(x * x + y * y + z * z)
    if length == 0.0:
        raise ZeroRadius("point coincides with the reel center")
    # min/max guard against |y|/L exceeding 1 by an ulp
    elevation = math.asin(max(-1.0, min(1.0, y / length)))
    azimuth = math.atan2(x, z)
    if azimuth == -math.pi:
        azimuth = math.pi
    return TetherState(length, elevation, azimuth)


def _jacobian_rows(s: TetherState):
    length, elevation, azimuth = s
    ct, st = math.cos(elevation), math.sin(elevation)
    cp, sp = math.cos(azimuth), math.sin(azimuth)
    return (
        [ct * sp, -length * st * sp, length * ct * cp],
        [st, length * ct, 0.0],
        [ct * cp, -length * st * cp, -length * ct * sp],
    )


def jacobian(s: TetherState) -> np.ndarray:
    """Jacobian of the Cartesian position w.r.t. ``(L, theta, phi)``.

    Rows are ``(x, y, z)``, columns ``(L, theta, phi)``.
    """
    return np.array(_jacobian_rows(s))


def det3(m) -> float:
    """Determinant of a 3x3 matrix by cofactor expansion along the first row."""
    (a, b, c), (d, e, f), (g, h, i) = m
    return a * (e * i - f * h) - b * (d * i - f * g) + c * (d * h - e * g)


def _eliminate(pivot_row, row, col):
    factor = row[col] / pivot_row[col]
    return [r - factor * p for r, p in zip(row, pivot_row)]


def solve3(m, rhs) -> list[float]:
    """Solve a 3x3 system by Gaussian elimination with partial pivoting.

    Raises:
        ZeroDivisionError: if the matrix is exactly singular.
    """
    r0, r1, r2 = ([*row, b] for row, b in zip(m, rhs))
    # column 0
    if abs(r1[0]) > abs(r0[0]) and abs(r1[0]) >= abs(r2[0]):
        r0, r1 = r1, r0
    elif abs(r2[0]) > abs(r0[0]):
        r0, r2 = r2, r0
    if r0[0] == 0.0:
        raise ZeroDivisionError("singular matrix")
    r1 = _eliminate(r0, r1, 0)
    r2 = _eliminate(r0, r2, 0)
    # column 1
    if abs(r2[1]) > abs(r1[1]):
        r1, r2 = r2, r1
    if r1[1] == 0.0:
        raise ZeroDivisionError("singular matrix")
    r2 = _eliminate(r1, r2, 1)
    if r2[2] == 0.0:
        raise ZeroDivisionError("singular matrix")
    x2 = r2[3] / r2[2]
    x1 = (r1[3] - r1[2] * x2) / r1[1]
    x0 = (r0[3] - r0[1] * x1 - r0[2] * x2) / r0[0]
    return [x0, x1, x2]


def jacobian_determinant(s: TetherState) -> float:
    """Numeric determinant of :func:`jacobian`. Analytically ``-L**2 * cos(theta)``."""
    return det3(_jacobian_rows(s))


def singularity_margin(s: TetherState) -> float:
    """Scale-free distance from the vertical singularity: ``cos(theta)``."""
    return math.cos(s.elevation)


def solve_velocity(
    s: TetherState, v: CartesianVelocity, eps: float = DEFAULT_SINGULARITY_EPS
) -> ControlCommand:
    """Tether rates producing the Cartesian velocity ``v`` at configuration ``s``.

    Solves ``J u = v`` by Gaussian elimination with partial pivoting.

    Raises:
        NearSingular: if ``cos(theta) < eps``.
    """
    if eps <= 0.0:
        raise ValueError(f"eps must be positive, got {eps}")
    margin = singularity_margin(s)
    if margin < eps:
        raise NearSingular(margin, eps)
    return ControlCommand(*solve3(_jacobian_rows(s), v))
