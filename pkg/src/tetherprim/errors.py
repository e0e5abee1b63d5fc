"""Exception types raised by tetherprim."""


class TetherPrimError(Exception):
    """Base class for all tetherprim errors."""


class InvalidState(TetherPrimError, ValueError):
    """A tether configuration violates L > 0 or the elevation/azimuth ranges."""


class ZeroRadius(TetherPrimError, ValueError):
    """A Cartesian point sits at the reel center, where the tether map is undefined."""


class NearSingular(TetherPrimError):
    """The elevation is too close to vertical for an inverse-Jacobian solve."""

    def __init__(self, margin: float, eps: float):
        super().__init__(f"cos(elevation)={margin:.3g} below singularity threshold {eps:.3g}")
        self.margin = margin
        self.eps = eps


class CoincidentTarget(TetherPrimError, ValueError):
    """The target waypoint coincides with the current position."""


class NonDivisibleSegment(TetherPrimError, ValueError):
    """A path segment's horizontal length is not a whole multiple of the interval."""


class TooShort(TetherPrimError, ValueError):
    """A trajectory is too short to resample into at least three points."""


class ConfigError(TetherPrimError, ValueError):
    """Invalid scenario configuration."""
