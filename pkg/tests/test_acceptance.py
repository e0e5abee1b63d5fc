"""Acceptance gate. Each test checks one criterion and reports a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -v`` (lines also appear in the
terminal summary).
"""

import math
import time

import numpy as np
import pytest

from conftest import SCENARIOS, central_difference_jacobian, random_states
from tetherprim.bench import run_benchmark
from tetherprim.errors import NearSingular
from tetherprim.executor import Outcome, densify_path, run_episode
from tetherprim.geometry import (
    CartesianVelocity,
    ControlCommand,
    TetherState,
    cartesian_to_tether,
    jacobian,
    jacobian_determinant,
    solve_velocity,
    tether_to_cartesian,
    wrap_angle,
)
from tetherprim.metrics import cross_track_errors
from tetherprim.plant import PlantParams, initial_plant_state, plant_step
from tetherprim.scenario import DEFAULT_INTERVALS, load_spec, parse_spec

pytestmark = pytest.mark.acceptance


@pytest.fixture(scope="module")
def exp1_run(tmp_path_factory):
    spec = load_spec(SCENARIOS / "experiment1.yaml")
    return run_benchmark(spec, tmp_path_factory.mktemp("exp1_a"), jobs=1)


@pytest.fixture(scope="module")
def exp2_position_run(tmp_path_factory):
    spec = load_spec(SCENARIOS / "experiment2.yaml").model_copy(update={"controllers": ["position"]})
    assert spec.plant.noise_std.to_si() == (0.0, 0.0, 0.0)
    return run_benchmark(spec, tmp_path_factory.mktemp("exp2"), jobs=1)


def _rows(artifact, controller):
    rows = [r for r in artifact.summary if r["controller"] == controller]
    return sorted(rows, key=lambda r: r["interval_m"])


def test_c1_geometry_oracle_suite(acceptance_report):
    rng = np.random.default_rng(20190101)
    states = random_states(rng, 10_000)
    velocities = rng.uniform(-2.0, 2.0, size=(10_000, 3))

    t0 = time.perf_counter()
    worst_roundtrip = worst_fd = worst_det = worst_det_magnitude = worst_residual = 0.0
    for s, v in zip(states, velocities):
        back = cartesian_to_tether(tether_to_cartesian(s))
        worst_roundtrip = max(
            worst_roundtrip,
            abs(back.length - s.length),
            abs(back.elevation - s.elevation),
            abs(wrap_angle(back.azimuth - s.azimuth)),
        )
        J = jacobian(s)
        fd = central_difference_jacobian(s)
        worst_fd = max(worst_fd, np.max(np.abs(J - fd)) / np.max(np.abs(J)))
        det = jacobian_determinant(s)
        expected = s.length**2 * math.cos(s.elevation)
        worst_det = max(worst_det, abs(det - expected) / s.length**2)
        worst_det_magnitude = max(worst_det_magnitude, abs(abs(det) - expected) / s.length**2)
        try:
            u = solve_velocity(s, CartesianVelocity(*v))
        except NearSingular:
            continue
        residual = np.linalg.norm(J @ np.array(u) - v) / max(1.0, np.linalg.norm(v))
        worst_residual = max(worst_residual, residual)
    elapsed = time.perf_counter() - t0

    checks = {
        "roundtrip<1e-9": worst_roundtrip < 1e-9,
        "jacobian-vs-FD<1e-5": worst_fd < 1e-5,
        "|detJ-L^2cos|<1e-9L^2": worst_det < 1e-9,
        "solve-residual<1e-9": worst_residual < 1e-9,
        "runtime<1s": elapsed < 1.0,
    }
    detail = (
        f"roundtrip {worst_roundtrip:.2e}, FD rel {worst_fd:.2e}, det {worst_det:.2e} "
        f"(|det| vs L^2 cos: {worst_det_magnitude:.2e}), residual {worst_residual:.2e}, "
        f"{elapsed:.2f}s; failing: {[k for k, ok in checks.items() if not ok] or 'none'}"
    )
    acceptance_report("C1 geometry oracle suite", all(checks.values()), detail)
    assert all(checks.values()), detail


@pytest.mark.parametrize("interval, count", list(zip(DEFAULT_INTERVALS, (31, 13, 7, 5, 3))))
def test_c2_waypoint_counts(interval, count, acceptance_report):
    corners = load_spec(SCENARIOS / "experiment1.yaml").corners()
    n = len(densify_path(corners, interval))
    acceptance_report(f"C2 waypoint count @ {interval} m", n == count, f"{n} (expected {count})")
    assert n == count


def test_c3_arc_artifact(acceptance_report):
    spec = parse_spec({"name": "arc", "path": {"builtin": "experiment2"}, "intervals": [3.0]})
    corners = spec.corners()
    path = densify_path(corners, 3.0, spec.acceptance_radius)
    assert len(path) == 2
    start = spec.initial_tether_state()
    params = spec.plant_params(0)
    assert params.noise_std == (0.0, 0.0, 0.0)

    pos = run_episode(path, spec.controller_config("position"), params, start, spec.timeout)
    lengths = np.array([s.true_state.length for s in pos.trajectory])
    azimuth = np.unwrap([s.true_state.azimuth for s in pos.trajectory])
    length_variation = (lengths.max() - lengths.min()) / lengths[0]
    sweep = math.degrees(azimuth.max() - azimuth.min())

    vel = run_episode(path, spec.controller_config("velocity"), params, start, spec.timeout)
    ok = length_variation < 0.02 and sweep > 90.0 and vel.outcome is Outcome.SINGULARITY_ABORT
    acceptance_report(
        "C3 arc artifact",
        ok,
        f"L variation {100 * length_variation:.3f}% (<2%), azimuth sweep {sweep:.1f} deg (>90), "
        f"velocity outcome {vel.outcome.value}",
    )
    assert ok


def test_c4_position_density_trend(exp2_position_run, acceptance_report):
    rows = _rows(exp2_position_run, "position")
    means = [r["mean_cte_m"] for r in rows]
    assert [r["interval_m"] for r in rows] == list(DEFAULT_INTERVALS)
    assert all(r["trials"] == 3 for r in rows)
    ok = all(b >= a for a, b in zip(means, means[1:]))
    acceptance_report(
        "C4 position accuracy vs density (exp 2)", ok, "mean CTE " + " <= ".join(f"{m:.3f}" for m in means)
    )
    assert ok


def test_c5_velocity_density_insensitivity(exp1_run, exp2_position_run, acceptance_report):
    vel = [r["mean_cte_m"] for r in _rows(exp1_run, "velocity")]
    pos = [r["mean_cte_m"] for r in _rows(exp2_position_run, "position")]
    vel_range, pos_range = max(vel) - min(vel), max(pos) - min(pos)
    ok = vel_range < 0.5 * pos_range
    acceptance_report(
        "C5 velocity insensitivity",
        ok,
        f"velocity range (exp 1) {vel_range:.3f} m < 0.5 x position range (exp 2) {pos_range:.3f} m",
    )
    assert ok


@pytest.mark.parametrize("controller", ["position", "velocity"])
def test_c6_smoothness_trend(controller, exp1_run, acceptance_report):
    rows = {r["interval_m"]: r for r in _rows(exp1_run, controller)}
    sparse, dense = rows[3.0]["mean_smoothness_rad"], rows[0.2]["mean_smoothness_rad"]
    ok = sparse <= dense
    acceptance_report(
        f"C6 smoothness trend ({controller})", ok, f"3 m {sparse:.4f} rad <= 0.2 m {dense:.4f} rad"
    )
    assert ok


@pytest.mark.parametrize("interval", DEFAULT_INTERVALS)
def test_c7_composite_completes_over_reel(interval, acceptance_report):
    spec = load_spec(SCENARIOS / "experiment2.yaml")
    corners = spec.corners()
    path = densify_path(corners, interval, spec.acceptance_radius)
    start = spec.initial_tether_state()
    params = spec.plant_params(0)
    composite = run_episode(path, spec.controller_config("composite"), params, start, spec.timeout)
    velocity = run_episode(path, spec.controller_config("velocity"), params, start, spec.timeout)
    pts = [s.true_position for s in composite.trajectory]
    max_cte = float(cross_track_errors(pts, corners).max())
    ok = (
        composite.outcome is Outcome.COMPLETED
        and velocity.outcome is Outcome.SINGULARITY_ABORT
        and max_cte < 0.5
    )
    acceptance_report(
        f"C7 composite over reel @ {interval} m",
        ok,
        f"composite {composite.outcome.value}, velocity {velocity.outcome.value}, max CTE {max_cte:.3f} m (<0.5)",
    )
    assert ok


def test_c8_velocity_straightness(acceptance_report):
    spec = parse_spec(
        {
            "name": "straight",
            "path": {"corners": [[2.5, 1.0, 1.5], [2.5, 1.0, -1.5]]},
            "intervals": [3.0],
            "controllers": ["velocity"],
        }
    )
    corners = spec.corners()
    path = densify_path(corners, 3.0, spec.acceptance_radius)
    result = run_episode(
        path, spec.controller_config("velocity"), spec.plant_params(0), spec.initial_tether_state(), spec.timeout
    )
    pts = [s.true_position for s in result.trajectory]
    max_cte = float(cross_track_errors(pts, corners).max())
    max_elev = math.degrees(max(s.true_state.elevation for s in result.trajectory))
    ok = result.outcome is Outcome.COMPLETED and max_elev < 60.0 and max_cte < 0.05
    acceptance_report(
        "C8 velocity straightness",
        ok,
        f"{result.outcome.value}, max elevation {max_elev:.1f} deg, max CTE {max_cte:.2e} m (<0.05)",
    )
    assert ok


def test_c9_determinism(exp1_run, tmp_path, acceptance_report):
    spec = load_spec(SCENARIOS / "experiment1.yaml")
    again = run_benchmark(spec, tmp_path / "exp1_b", jobs=4)
    assert len(again.trajectory_files) == 30 and len(again.summary) == 10
    mismatched = [
        a.name for a, b in zip(exp1_run.trajectory_files, again.trajectory_files) if a.read_bytes() != b.read_bytes()
    ]
    same_summary = (
        exp1_run.summary_csv.read_bytes() == again.summary_csv.read_bytes()
        and exp1_run.summary_json.read_bytes() == again.summary_json.read_bytes()
    )
    ok = not mismatched and same_summary
    acceptance_report(
        "C9 determinism",
        ok,
        f"30 trajectories, {len(mismatched)} differ; summary files identical: {same_summary}",
    )
    assert ok


def _command(t: float) -> ControlCommand:
    return ControlCommand(0.3 * math.cos(2 * t), 0.2 * math.sin(3 * t), -0.4 * math.cos(t))


def _analytic_state(start: TetherState, t: float) -> TetherState:
    return TetherState(
        start.length + 0.15 * math.sin(2 * t),
        start.elevation + (0.2 / 3) * (1 - math.cos(3 * t)),
        wrap_angle(start.azimuth - 0.4 * math.sin(t)),
    )


def _end_position_error(dt: float, start: TetherState, duration: float) -> float:
    params = PlantParams(actuator_tau=0.0, dt=dt)
    state = initial_plant_state(start, params)
    n = round(duration / dt)
    for k in range(n):
        state = plant_step(state, _command(k * dt), params)
    exact = tether_to_cartesian(_analytic_state(start, duration))
    return math.dist(tether_to_cartesian(state.true_state), exact)


def test_c10_plant_convergence(acceptance_report):
    start = TetherState(2.0, 0.3, 0.5)
    coarse = _end_position_error(0.01, start, 2.0)
    fine = _end_position_error(0.005, start, 2.0)
    ratio = fine / coarse
    ok = 0.4 <= ratio <= 0.6
    acceptance_report(
        "C10 plant convergence", ok, f"end error {coarse:.3e} -> {fine:.3e} m, ratio {ratio:.3f} in [0.4, 0.6]"
    )
    assert ok
