import numpy as np
import pytest

from esi.forward import Geometry, forward_analytic
from esi.signal import AnalyticWavelet, TimeGrid, make_coherent_noise


@pytest.fixture(scope="session")
def grid():
    return TimeGrid.from_bounds(0.25, 0.65, 0.001)


@pytest.fixture(scope="session")
def geom(grid):
    return Geometry(1.0, grid)


@pytest.fixture(scope="session")
def w_star():
    return AnalyticWavelet(40.0, 0.0, 0.025)


@pytest.fixture(scope="session")
def d_clean(geom, w_star):
    return forward_analytic(0.4, w_star, geom)


@pytest.fixture(scope="session")
def d_coherent(d_clean):
    """Clean data plus a 30% copy delayed by 0.1 s."""
    return d_clean + make_coherent_noise(d_clean, 0.1, 0.3)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
