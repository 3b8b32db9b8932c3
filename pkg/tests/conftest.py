import numpy as np
import pytest

from quasicomm.linalg import spectral_norm

ACCEPTANCE_LINES: list[str] = []


def crandn(rng, *shape):
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2)


def rand_hermitian(rng, n, norm=1.0):
    g = crandn(rng, n, n)
    h = (g + g.conj().T) / 2
    return norm * h / spectral_norm(h)


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
