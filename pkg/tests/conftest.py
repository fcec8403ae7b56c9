import numpy as np
import pytest

from elliptica.theta import DEFAULT_CURVE

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def curve():
    return DEFAULT_CURVE


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
