"""Flight accuracy (cross-track error) and path smoothness (mean turning angle)."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from tetherprim.errors import TooShort

DEFAULT_RESAMPLE_INTERVAL = 0.1


@dataclass(frozen=True)
class MetricsReport:
    mean_cross_track: float
    max_cross_track: float
    smoothness: float
    outcome: str
    duration: float
    n_samples: int

    def as_dict(self) -> dict:
        return {
            "mean_cross_track": self.mean_cross_track,
            "max_cross_track": self.max_cross_track,
            "smoothness": self.smoothness,
            "outcome": self.outcome,
            "duration": self.duration,
            "n_samples": self.n_samples,
        }


def _as_points(points) -> np.ndarray:
    arr = np.asarray(points, dtype=float)
    if arr.ndim != 2 or arr.shape[1] != 3:
        raise ValueError(f"expected an (n, 3) array of points, got shape {arr.shape}")
    return arr


def _check_ideal(ideal: np.ndarray) -> None:
    if len(ideal) < 2:
        raise ValueError("ideal path needs at least two points")
    if np.any(np.all(np.diff(ideal, axis=0) == 0.0, axis=1)):
        raise ValueError("consecutive ideal path points must be distinct")


def cross_track_errors(points, ideal) -> np.ndarray:
    """Distance from each point to the closest point on the ideal polyline."""
    p = _as_points(points)
    path = _as_points(ideal)
    _check_ideal(path)
    a = path[:-1]
    seg = path[1:] - a
    seg_len2 = np.einsum("ij,ij->i", seg, seg)
    # (n_points, n_segments, 3)
    rel = p[:, None, :] - a[None, :, :]
    t = np.clip(np.einsum("nsj,sj->ns", rel, seg) / seg_len2, 0.0, 1.0)
    closest = a[None, :, :] + t[..., None] * seg[None, :, :]
    dist = np.linalg.norm(p[:, None, :] - closest, axis=2)
    return dist.min(axis=1)


def cross_track_error(p: Sequence[float], ideal) -> float:
    return float(cross_track_errors([p], ideal)[0])


def resample_by_arc_length(points, interval: float) -> np.ndarray:
    """Points spaced ``interval`` apart in arc length along a polyline, starting at its head."""
    p = _as_points(points)
    if interval <= 0.0:
        raise ValueError("resample interval must be positive")
    step = np.linalg.norm(np.diff(p, axis=0), axis=1)
    keep = np.concatenate([[True], step > 0.0])
    p = p[keep]
    if len(p) < 2:
        return p
    s = np.concatenate([[0.0], np.cumsum(np.linalg.norm(np.diff(p, axis=0), axis=1))])
    n = int(math.floor(s[-1] / interval + 1e-9))
    targets = np.arange(n + 1) * interval
    return np.column_stack([np.interp(targets, s, p[:, k]) for k in range(3)])


def turning_angles(points) -> np.ndarray:
    """Angle between incoming and outgoing chords at every interior point."""
    p = _as_points(points)
    chords = np.diff(p, axis=0)
    a, b = chords[:-1], chords[1:]
    cross = np.linalg.norm(np.cross(a, b), axis=1)
    dot = np.einsum("ij,ij->i", a, b)
    return np.arctan2(cross, dot)


def path_smoothness(trajectory, resample_interval: float = DEFAULT_RESAMPLE_INTERVAL) -> float:
    """Mean turning angle of the trajectory after uniform arc-length resampling.

    Raises:
        TooShort: if fewer than three resampled points exist.
    """
    resampled = resample_by_arc_length(trajectory, resample_interval)
    if len(resampled) < 3:
        raise TooShort(
            f"trajectory resamples to {len(resampled)} points at {resample_interval} m; need 3"
        )
    return float(np.mean(turning_angles(resampled)))


def evaluate_positions(
    positions,
    ideal,
    outcome: str,
    duration: float,
    resample_interval: float = DEFAULT_RESAMPLE_INTERVAL,
) -> MetricsReport:
    """Metrics for a sequence of true positions sampled at a fixed rate."""
    p = _as_points(positions)
    if len(p) < 2:
        raise ValueError("need at least two trajectory samples")
    cte = cross_track_errors(p, ideal)
    return MetricsReport(
        mean_cross_track=float(np.mean(cte)),
        max_cross_track=float(np.max(cte)),
        smoothness=path_smoothness(p, resample_interval),
        outcome=str(outcome),
        duration=float(duration),
        n_samples=len(p),
    )


def evaluate_episode(result, ideal, resample_interval: float = DEFAULT_RESAMPLE_INTERVAL) -> MetricsReport:
    """Metrics of an :class:`~tetherprim.executor.EpisodeResult` on its TRUE positions."""
    positions = [s.true_position for s in result.trajectory]
    return evaluate_positions(
        positions, ideal, result.outcome.value, result.elapsed, resample_interval
    )
