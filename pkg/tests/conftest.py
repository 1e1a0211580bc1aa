from pathlib import Path

import numpy as np
import pytest

from tomo.bodies import Ellipsoid, LpBall, Polytope, ball, load_body

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture
def fixtures():
    return FIXTURES


@pytest.fixture
def rng():
    return np.random.default_rng(20240607)


@pytest.fixture
def ellipsoid3():
    return load_body(FIXTURES / "ellipsoid3.json")


@pytest.fixture
def square():
    return Polytope.box([-1, -1], [1, 1])


@pytest.fixture
def cube():
    return Polytope.box([-1, -1, -1], [1, 1, 1])


@pytest.fixture
def lp4():
    return LpBall(4, [1, 1], [0, 0])


def corpus():
    """Bodies every range/identity property is checked on."""
    g = np.random.default_rng(7)
    A = g.normal(size=(3, 3))
    return {
        "disk": ball(2),
        "ellipse": Ellipsoid(np.array([[2.0, 0.4], [0.4, 0.8]]), np.array([0.2, -0.1])),
        "ball3": ball(3),
        "ellipsoid": Ellipsoid(A @ A.T + np.eye(3), np.array([0.1, 0.0, -0.2])),
        "square": Polytope.box([-1, -1], [1, 1]),
        "pentagon": Polytope.regular_polygon(5, phase=0.2),
        "cube": Polytope.box([-1, -1, -1], [1, 1, 1]),
        "lp4": LpBall(4, [1.0, 0.7], [0.1, -0.2]),
        "lp4-3d": LpBall(4, [1, 1, 1], [0, 0, 0]),
    }


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import report_lines
    except ImportError:
        return
    lines = report_lines()
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
