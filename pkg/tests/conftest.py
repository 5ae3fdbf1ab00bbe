import numpy as np
import pytest

from maxalg import MaxMatrix


@pytest.fixture
def rng():
    return np.random.default_rng(7)


def random_matrix(rng, n, top=2.0, density=0.6):
    return MaxMatrix(rng.uniform(0, top, (n, n)) * (rng.random((n, n)) < density))


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import RESULT_LINES

    if RESULT_LINES:
        terminalreporter.section("acceptance criteria")
        for line in RESULT_LINES:
            terminalreporter.write_line(line)
