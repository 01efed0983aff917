from fractions import Fraction

import pytest
from hypothesis import strategies as st

from relent.relation import FiniteRelation, PointSet, relation

F = Fraction


@pytest.fixture
def ex11():
    return relation([0, 1], [(0, 0), (0, 1), (1, 0)])


@pytest.fixture
def ex13():
    return relation([0, F(1, 2), 1], [(0, F(1, 2)), (0, 1), (F(1, 2), 0), (1, 0)])


@pytest.fixture
def identity3():
    return relation([0, F(1, 2), 1], [(0, 0), (F(1, 2), F(1, 2)), (1, 1)])


@pytest.fixture
def cycle2():
    return relation([0, 1], [(0, 1), (1, 0)])


@st.composite
def relations(draw, max_points=5, min_points=1):
    """Random relation on points i/(n-1) of [0,1]."""
    n = draw(st.integers(min_points, max_points))
    space = PointSet.from_values([F(i, max(n - 1, 1)) for i in range(n)])
    all_pairs = [(a, b) for a in space.ids for b in space.ids]
    chosen = draw(st.lists(st.sampled_from(all_pairs), unique=True, max_size=len(all_pairs)))
    return FiniteRelation(space, frozenset(chosen))


# one line per acceptance criterion, printed after the run
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1])):
            terminalreporter.write_line(line)
