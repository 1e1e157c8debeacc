import pytest

from quadrative.balls import Hull, Omega0, OmegaEps
from quadrative.cli import default_eps

_acceptance_lines = []


def record(number, ok, detail):
    """Collect one acceptance line; printed in the terminal summary."""
    _acceptance_lines.append(f"acceptance {number}: {'PASS' if ok else 'FAIL'}  {detail}")


def pytest_terminal_summary(terminalreporter):
    if _acceptance_lines:
        terminalreporter.section("acceptance criteria")
        for line in _acceptance_lines:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def eps_star():
    return default_eps()


@pytest.fixture(scope="session")
def omega0():
    return Omega0()


@pytest.fixture(scope="session")
def omega(eps_star):
    return OmegaEps(eps_star)


@pytest.fixture(scope="session")
def hull(eps_star):
    return Hull(OmegaEps(eps_star))
