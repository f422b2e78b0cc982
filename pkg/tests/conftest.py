import math
import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from riskcap import EligibleAsset, ScenarioSpace  # noqa: E402

GOLDEN = Path(__file__).parent / "golden"


@pytest.fixture
def space4():
    return ScenarioSpace.uniform(4)


@pytest.fixture
def x_star():
    return np.array([-2.0, -1.0, 1.0, 3.0])


@pytest.fixture
def s_star():
    """Defaultable bond: zero recovery in the last state."""
    return EligibleAsset(0.9, np.array([1.0, 1.0, 1.0, 0.0]))


@pytest.fixture
def s_dagger():
    return EligibleAsset(1.0, np.array([2.0, 1.0, 1.0, 0.5]))


@pytest.fixture
def cash4():
    return EligibleAsset.risk_free(4)


@pytest.fixture
def golden():
    return GOLDEN


def isclose(a, b, tol):
    if math.isinf(a) or math.isinf(b):
        return a == b
    return abs(a - b) <= tol


ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def criterion():
    """Record one PASS/FAIL line per acceptance criterion, then assert it."""

    def record(number: int, ok: bool, detail: str) -> None:
        line = f"criterion {number:2d}: {'PASS' if ok else 'FAIL'}  {detail}"
        print(line)
        ACCEPTANCE_LINES.append(line)
        assert ok, line

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
