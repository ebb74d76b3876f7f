import pytest

from bisys.core import CentralPotential, make_system

ACCEPTANCE_RESULTS = []

HYDROGEN_M1 = 1836.15267


@pytest.fixture(scope="session")
def coulomb():
    return CentralPotential.coulomb(1.0)


@pytest.fixture(scope="session")
def harmonic():
    return CentralPotential.harmonic(1.0)


@pytest.fixture(scope="session")
def hydrogen():
    return make_system(HYDROGEN_M1, 1.0)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in ACCEPTANCE_RESULTS:
        terminalreporter.write_line(line)
