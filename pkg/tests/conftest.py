import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from antiwick import polynomial

settings.register_profile("default", deadline=None, max_examples=40,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split("]")[1].split(".")[0])):
            terminalreporter.write_line(line)


@pytest.fixture
def z2():
    return polynomial([(1, 1, 1.0)], name="z2")


@pytest.fixture
def x2():
    return polynomial([(2, 0, 0.25), (1, 1, 0.5), (0, 2, 0.25)], name="x2")


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
