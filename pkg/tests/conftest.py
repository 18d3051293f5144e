import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from polyheis.polygon import hexagon, square

settings.register_profile(
    "polyheis", deadline=None, max_examples=60,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.function_scoped_fixture],
)
settings.load_profile("polyheis")

ACCEPTANCE_LINES: list = []


@pytest.fixture(scope="session")
def hexa():
    return hexagon()


@pytest.fixture(scope="session")
def sq():
    return square()


@pytest.fixture
def rng():
    return np.random.default_rng(42)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
