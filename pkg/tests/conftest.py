import pytest

from rse.fockspace import FockSpace, coherent_state, fock_state
from rse.subspace import build_subspace


@pytest.fixture(scope="session")
def space200():
    return FockSpace(200)


@pytest.fixture(scope="session")
def model100(space200):
    """Single target |100> with reference |alpha=10>."""
    return build_subspace([fock_state(space200, 100)], coherent_state(space200, 10))


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
