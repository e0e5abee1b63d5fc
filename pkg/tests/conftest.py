import math
from pathlib import Path

import numpy as np
import pytest

from tetherprim.geometry import TetherState, tether_to_cartesian

ROOT = Path(__file__).resolve().parents[1]
SCENARIOS = ROOT / "scenarios"


def central_difference_jacobian(s: TetherState, h: float = 1e-6) -> np.ndarray:
    """Columns are d(x, y, z)/d(L, theta, phi) by central differences."""
    cols = []
    for j in range(3):
        plus = list(s)
        minus = list(s)
        plus[j] += h
        minus[j] -= h
        fp = tether_to_cartesian(TetherState(*plus))
        fm = tether_to_cartesian(TetherState(*minus))
        cols.append([(a - b) / (2 * h) for a, b in zip(fp, fm)])
    return np.array(cols).T


def random_states(rng: np.random.Generator, n: int, margin: float = 1e-6):
    lengths = np.exp(rng.uniform(math.log(0.1), math.log(100.0), n))
    elevations = rng.uniform(-math.pi / 2 + margin, math.pi / 2 - margin, n)
    azimuths = rng.uniform(-math.pi, math.pi, n)
    return [TetherState(float(a), float(b), float(c)) for a, b, c in zip(lengths, elevations, azimuths)]


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


_ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def acceptance_report():
    """Collects one PASS/FAIL line per acceptance criterion for the terminal summary."""

    def record(criterion: str, ok: bool, detail: str) -> None:
        line = f"[{'PASS' if ok else 'FAIL'}] {criterion}: {detail}"
        _ACCEPTANCE_LINES.append(line)
        print(line)

    return record


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
