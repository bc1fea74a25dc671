import functools

import pytest

from eqforge.equivariants import equivariant_basis
from eqforge.grouprep import GroupParams, generator_matrices


@functools.lru_cache(maxsize=None)
def solver_basis(a, b, d=3):
    params = GroupParams.g(a, b)
    return tuple(equivariant_basis(generator_matrices(params), 8, d))


@pytest.fixture(scope="session")
def g53():
    return GroupParams.g(5, 3)


@pytest.fixture(scope="session")
def g133():
    return GroupParams.g(13, 3)


@pytest.fixture(scope="session")
def h53():
    return GroupParams.h(5, 3)


ACCEPTANCE_LINES = {}


def record_acceptance(number, passed, detail):
    status = "PASS" if passed else "FAIL"
    line = f"[{status}] criterion {number:>2}: {detail}"
    ACCEPTANCE_LINES[number] = line
    print(line)
    return passed


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for number in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[number])
