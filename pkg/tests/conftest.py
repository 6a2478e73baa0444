from fractions import Fraction

import pytest
from hypothesis import strategies as st

from indexsys.fixtures import doubling_map, doubling_system, tent_map, tent_system, tent_trivial_system

ACCEPTANCE_LINES: list[str] = []


def rationals(lo=-3, hi=3, denom=60):
    return st.builds(Fraction, st.integers(lo * denom, hi * denom), st.just(denom))


def cell_lists(lo=-3, hi=3, denom=60, max_size=6):
    pair = st.tuples(rationals(lo, hi, denom), rationals(lo, hi, denom)).map(lambda t: (min(t), max(t)))
    return st.lists(pair, max_size=max_size)


@pytest.fixture(scope="session")
def tent():
    return tent_map(), tent_system()


@pytest.fixture(scope="session")
def doubling():
    return doubling_map(), doubling_system()


@pytest.fixture(scope="session")
def trivial():
    return tent_map(), tent_trivial_system()


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
