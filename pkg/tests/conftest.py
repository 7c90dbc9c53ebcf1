import numpy as np
import pytest

from phaselock import bundled_path
from phaselock.oscillator import InteractionFunction
from phaselock.phasemodel import PhaseConfig

SET_I = dict(epsilon=0.05, Omega=0.2632)
SET_II = dict(epsilon=0.001, Omega=0.455)


@pytest.fixture(scope="session")
def h_one():
    return InteractionFunction.load(bundled_path("H_I"))


@pytest.fixture(scope="session")
def h_two():
    return InteractionFunction.load(bundled_path("H_II"))


@pytest.fixture
def pure_sine():
    return InteractionFunction([0.0, 0.0], [1.0])


def set_one(tau):
    return PhaseConfig(tau=tau, **SET_I)


def set_two(tau):
    return PhaseConfig(tau=tau, **SET_II)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


# one line per acceptance criterion, printed after the run
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.write_sep("=", "acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)
