import numpy as np
import pytest

from subradiance.coupling import assemble
from subradiance.geometry import build_lattice
from subradiance.hilbert import HilbertSpace
from subradiance.spectral import diagonalize


def random_lattice(rng, max_atoms=10):
    """Random rectangular lattice with at most ``max_atoms`` sites and random d, k."""
    while True:
        dims = tuple(int(x) for x in rng.integers(1, 5, size=3))
        if 2 <= np.prod(dims) <= max_atoms:
            break
    spacing = float(rng.uniform(0.1, 1.0))
    return build_lattice(dims, spacing, d_hat=rng.normal(size=3), k_hat=rng.normal(size=3))


@pytest.fixture
def rng():
    return np.random.default_rng(20161203)


@pytest.fixture(scope="session")
def chain16_m2_01():
    space = HilbertSpace(16, 2)
    A = assemble(space, build_lattice((1, 1, 16), 0.1))
    return space, A, diagonalize(A)


@pytest.fixture(scope="session")
def chain16_m2_025():
    space = HilbertSpace(16, 2)
    A = assemble(space, build_lattice((1, 1, 16), 0.25))
    return space, A, diagonalize(A)


@pytest.fixture(scope="session")
def chain16_m3_025():
    space = HilbertSpace(16, 3)
    A = assemble(space, build_lattice((1, 1, 16), 0.25))
    return space, A, diagonalize(A)


_ACCEPTANCE_LINES = []


@pytest.fixture(scope="session")
def acceptance_report():
    return _ACCEPTANCE_LINES


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
