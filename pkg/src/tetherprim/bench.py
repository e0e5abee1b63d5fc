"""Batch benchmark runner: every (controller, interval, trial) cell of a scenario."""

from __future__ import annotations

import csv
import datetime
import hashlib
import io
import json
import math
import platform
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from tetherprim.errors import TooShort
from tetherprim.executor import EpisodeResult, densify_path, run_episode
from tetherprim.metrics import evaluate_positions
from tetherprim.scenario import ScenarioSpec

TRAJECTORY_COLUMNS = (
    "t",
    "L_true", "theta_true", "phi_true",
    "x_true", "y_true", "z_true",
    "L_sensed", "theta_sensed", "phi_sensed",
    "Ldot_cmd", "thetadot_cmd", "phidot_cmd",
    "active_waypoint", "mode",
)

SUMMARY_COLUMNS = (
    "scenario", "controller", "interval_m", "trials",
    "mean_cte_m", "std_cte_m", "max_cte_m",
    "mean_smoothness_rad", "std_smoothness_rad",
    "completed", "timeout", "singularity_abort",
)

OUTCOMES = ("completed", "timeout", "singularity_abort")


def fmt(value: float) -> str:
    """Serialize a float with 9 significant digits."""
    return f"{value:.9g}"


def cell_seed(base_seed: int, controller: str, interval: float, trial: int) -> int:
    """Deterministic per-trial seed: ``base_seed`` plus a stable hash of the cell."""
    key = f"{controller}|{fmt(interval)}|{trial}".encode()
    offset = int.from_bytes(hashlib.sha256(key).digest()[:4], "big")
    return (base_seed + offset) % 2**63


def trajectory_filename(scenario: str, controller: str, interval: float, trial: int) -> str:
    return f"{scenario}__{controller}__{fmt(interval)}m__trial{trial}.csv"


def trajectory_rows(result: EpisodeResult) -> list[list[str]]:
    rows = []
    for s in result.trajectory:
        rows.append(
            [fmt(s.t)]
            + [fmt(v) for v in s.true_state]
            + [fmt(v) for v in s.true_position]
            + [fmt(v) for v in s.sensed_state]
            + [fmt(v) for v in s.command]
            + [str(s.active_waypoint), s.mode.value]
        )
    return rows


def write_csv(path: Path, header: Sequence[str], rows) -> None:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    path.write_text(buf.getvalue())


def read_trajectory(path) -> dict[str, np.ndarray]:
    """Load a trajectory CSV into column arrays (``mode`` stays a string array)."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if tuple(header) != TRAJECTORY_COLUMNS:
            raise ValueError(f"{path}: unexpected trajectory header {header}")
        rows = list(reader)
    columns = {}
    for i, name in enumerate(header):
        values = [row[i] for row in rows]
        if name == "mode":
            columns[name] = np.array(values)
        elif name == "active_waypoint":
            columns[name] = np.array(values, dtype=int)
        else:
            columns[name] = np.array(values, dtype=float)
    return columns


@dataclass(frozen=True)
class TrialTask:
    spec: ScenarioSpec
    controller: str
    interval: float
    trial: int
    seed: int
    out_path: Path


def run_trial(task: TrialTask) -> dict:
    """Run one episode, write its trajectory CSV, and return its metric record.

    Metrics are computed on the positions exactly as serialized so that they
    can be recomputed from the CSV bit for bit.
    """
    spec = task.spec
    corners = spec.corners()
    path = densify_path(corners, task.interval, spec.acceptance_radius)
    result = run_episode(
        path,
        spec.controller_config(task.controller),
        spec.plant_params(task.seed),
        spec.initial_tether_state(),
        spec.timeout,
    )
    rows = trajectory_rows(result)
    write_csv(task.out_path, TRAJECTORY_COLUMNS, rows)

    positions = [[float(v) for v in row[4:7]] for row in rows]
    record = {
        "controller": task.controller,
        "interval_m": task.interval,
        "trial": task.trial,
        "seed": task.seed,
        "n_waypoints": len(path),
        "trajectory_file": task.out_path.name,
    }
    try:
        report = evaluate_positions(
            positions, corners, result.outcome.value, result.elapsed, spec.resample_interval
        )
        record.update(report.as_dict())
    except (TooShort, ValueError):
        # too little motion to measure; the outcome is still data
        record.update(
            mean_cross_track=math.nan, max_cross_track=math.nan, smoothness=math.nan,
            outcome=result.outcome.value, duration=result.elapsed, n_samples=len(positions),
        )
    return record


def _stat(values: Sequence[float], fn) -> float:
    arr = np.asarray(values, dtype=float)
    arr = arr[~np.isnan(arr)]
    return float(fn(arr)) if len(arr) else math.nan


def summarize(spec: ScenarioSpec, records: list[dict]) -> list[dict]:
    """One row per (controller, interval) condition, in spec order.

    Standard deviations are population (ddof=0) over trials.
    """
    rows = []
    for controller in spec.controllers:
        for interval in spec.intervals:
            cell = [r for r in records if r["controller"] == controller and r["interval_m"] == interval]
            row = {
                "scenario": spec.name,
                "controller": controller,
                "interval_m": interval,
                "trials": len(cell),
                "mean_cte_m": _stat([r["mean_cross_track"] for r in cell], np.mean),
                "std_cte_m": _stat([r["mean_cross_track"] for r in cell], np.std),
                "max_cte_m": _stat([r["max_cross_track"] for r in cell], np.max),
                "mean_smoothness_rad": _stat([r["smoothness"] for r in cell], np.mean),
                "std_smoothness_rad": _stat([r["smoothness"] for r in cell], np.std),
            }
            for outcome in OUTCOMES:
                row[outcome] = sum(r["outcome"] == outcome for r in cell)
            rows.append(row)
    return rows


@dataclass
class RunArtifact:
    out_dir: Path
    trajectory_files: list[Path]
    summary_csv: Path
    summary_json: Path
    summary: list[dict]
    trials: list[dict]


def _summary_csv_row(row: dict) -> list[str]:
    out = []
    for col in SUMMARY_COLUMNS:
        value = row[col]
        out.append(fmt(value) if isinstance(value, float) else str(value))
    return out


def _json_safe(value):
    if isinstance(value, float) and math.isnan(value):
        return None
    return value


def plan_trials(spec: ScenarioSpec, traj_dir: Path) -> list[TrialTask]:
    tasks = []
    for controller in spec.controllers:
        for interval in spec.intervals:
            for trial in range(spec.trials):
                tasks.append(
                    TrialTask(
                        spec, controller, interval, trial,
                        cell_seed(spec.base_seed, controller, interval, trial),
                        traj_dir / trajectory_filename(spec.name, controller, interval, trial),
                    )
                )
    return tasks


def run_benchmark(
    spec: ScenarioSpec,
    out_dir,
    jobs: int = 1,
    seed: Optional[int] = None,
) -> RunArtifact:
    """Execute every cell of ``spec`` and write trajectories plus summaries.

    Layout under ``out_dir``: ``trajectories/*.csv``, ``summary.csv``,
    ``summary.json`` (data only, byte-stable) and ``metadata.json`` (wall-clock
    timestamps and environment).
    """
    if seed is not None:
        spec = spec.model_copy(update={"base_seed": seed})
    out_dir = Path(out_dir)
    traj_dir = out_dir / "trajectories"
    traj_dir.mkdir(parents=True, exist_ok=True)
    started = datetime.datetime.now(datetime.timezone.utc)

    tasks = plan_trials(spec, traj_dir)
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            records = list(pool.map(run_trial, tasks))
    else:
        records = [run_trial(t) for t in tasks]

    summary = summarize(spec, records)
    summary_csv = out_dir / "summary.csv"
    write_csv(summary_csv, SUMMARY_COLUMNS, [_summary_csv_row(r) for r in summary])

    summary_json = out_dir / "summary.json"
    payload = {
        "scenario": spec.name,
        "spec": spec.model_dump(mode="json"),
        "summary": [{k: _json_safe(v) for k, v in r.items()} for r in summary],
        "trials": [{k: _json_safe(v) for k, v in r.items()} for r in records],
    }
    summary_json.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")

    finished = datetime.datetime.now(datetime.timezone.utc)
    meta = {
        "started_utc": started.isoformat(),
        "finished_utc": finished.isoformat(),
        "python": platform.python_version(),
        "jobs": jobs,
    }
    (out_dir / "metadata.json").write_text(json.dumps(meta, indent=2) + "\n")

    return RunArtifact(
        out_dir, [t.out_path for t in tasks], summary_csv, summary_json, summary, records
    )


def densified_waypoint_rows(spec: ScenarioSpec) -> list[list[str]]:
    rows = []
    for interval in spec.intervals:
        path = densify_path(spec.corners(), interval, spec.acceptance_radius)
        for i, w in enumerate(path.waypoints):
            rows.append([fmt(interval), str(i)] + [fmt(v) for v in w])
    return rows
