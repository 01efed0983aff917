import math
from fractions import Fraction

import pytest

from relent.entropy import (GridRelation, diagonal_grid, full_grid, grid_entropy_estimate,
                            grid_from_piecewise_linear, identity_segments, tent_segments,
                            two_line_segments)
from relent.relation import SchemaError

F = Fraction


def test_tent_n4_has_eight_cells():
    R = grid_from_piecewise_linear(tent_segments(), 4)
    assert len(R.cells) == 8
    # every column meets two rows: the two monotone branches
    for i in range(4):
        assert sum(1 for c in R.cells if c[0] == i) == 2


def test_identity_n2_diagonal_only():
    # the closed boxes (0,1) and (1,0) touch the diagonal in a single point only
    R = grid_from_piecewise_linear(identity_segments(), 2)
    assert sorted(R.cells) == [(0, 0), (1, 1)]


@pytest.mark.parametrize("n", [8, 16, 32, 64])
def test_tent_root_is_exactly_two(n):
    rep = grid_entropy_estimate(grid_from_piecewise_linear(tent_segments(), n), 4)
    assert rep.root_lower == rep.root_upper == 2
    assert rep.method == "grid-cover" and "upper-estimate" in rep.flags


def test_tent_per_m_counts():
    rep = grid_entropy_estimate(grid_from_piecewise_linear(tent_segments(), 8), 3)
    assert [c for _, c, _ in rep.per_m] == [16, 32, 64]


def test_identity_grid_zero():
    assert grid_entropy_estimate(diagonal_grid(64), 5).value == 0.0


def test_full_grid_is_log_n():
    rep = grid_entropy_estimate(full_grid(3), 2)
    assert rep.root_lower == rep.root_upper == 3
    assert rep.value == pytest.approx(math.log(3))


def test_two_line_grid_positive():
    R = grid_from_piecewise_linear(two_line_segments(F(1, 2), F(7, 10)), 20)
    assert grid_entropy_estimate(R, 3).value > 0


def test_mask_roundtrip():
    R = grid_from_piecewise_linear(tent_segments(), 8)
    assert GridRelation.from_text(R.to_text()) == R


def test_mask_errors():
    with pytest.raises(SchemaError):
        GridRelation.from_text("")
    with pytest.raises(SchemaError):
        GridRelation.from_text("4\n0 9\n")
    with pytest.raises(SchemaError):
        GridRelation.from_text("4\n0 1 2\n")


def test_grid_validation():
    with pytest.raises(ValueError):
        GridRelation(4, frozenset())
    with pytest.raises(ValueError):
        grid_from_piecewise_linear(tent_segments(), 1)
    with pytest.raises(ValueError):
        grid_from_piecewise_linear([((0, 0), (0, 0))], 4)
    with pytest.raises(ValueError):
        grid_from_piecewise_linear([((0, 0), (2, 1))], 4)


def test_count_budget():
    with pytest.raises(ValueError):
        grid_entropy_estimate(diagonal_grid(4), 20, max_m=10)
