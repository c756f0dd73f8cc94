import numpy as np
import pytest

from cobotpath.kinematics import RobotGeometry

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(scope="session")
def geom():
    return RobotGeometry.default()


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


def random_q(rng, n=None):
    return rng.uniform(-np.pi, np.pi, size=(6,) if n is None else (n, 6))


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
