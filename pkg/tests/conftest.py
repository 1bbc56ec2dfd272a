import numpy as np
import pytest

from qtense.model import rabi_model

ACCEPTANCE_LINES = []


@pytest.fixture
def rabi():
    return rabi_model()


def rabi_u(t):
    """exp(-i sigma_x t) = cos t - i sin t sigma_x, written out by hand."""
    c, s = np.cos(t), np.sin(t)
    return np.array([[c, -1j * s], [-1j * s, c]])


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
