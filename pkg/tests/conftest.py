import numpy as np
import pytest

from rjdiag.synth import FamilySpec, generate_commuting, generate_family


def random_symmetric(rng, n):
    g = rng.standard_normal((n, n))
    return (g + g.T) / 2


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def commuting():
    """A 6x6, d=4 exactly commuting family and its ground truth."""
    return generate_commuting(FamilySpec(6, 4, seed=7))


@pytest.fixture
def noisy():
    return generate_family(FamilySpec(8, 5, noise_epsilon=1e-3, seed=11))[0]


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
