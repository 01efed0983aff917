from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import relations
from relent.chaos import (InconsistencyError, dc2_verdict, equivalence_report, exhaustive_sweep,
                          li_yorke_verdict, orbit_metric, projection_pair_witnesses,
                          uncountability_test)
from relent.relation import PointSet, SymbolicOrbit, check_domain_condition, relation
import relent.chaos as chaos

F = Fraction
ZERO = SymbolicOrbit((), ("0",))
ONE = SymbolicOrbit((), ("1",))
ALT = SymbolicOrbit((), ("1", "0"))


@pytest.fixture
def full2():
    return relation([0, 1], [(0, 0), (0, 1), (1, 0), (1, 1)])


def test_metric_examples(full2):
    assert orbit_metric(full2, ZERO, ZERO, 5) == 0
    assert orbit_metric(full2, ZERO, ALT, 0) == F(2, 3)
    assert orbit_metric(full2, ZERO, ALT, 1) == F(1, 3)


def test_metric_against_truncated_sum(full2):
    x, y = SymbolicOrbit(("1", "1"), ("0", "1", "1")), SymbolicOrbit(("0",), ("1", "0"))
    for n in range(4):
        partial = sum(F(1, 2**i) * abs(int(x.coord(n + i)) - int(y.coord(n + i))) for i in range(1, 60))
        assert abs(orbit_metric(full2, x, y, n) - partial) < F(1, 2**58)


def test_metric_caps_distance():
    sp = PointSet.from_values([0, 3])
    assert orbit_metric(sp, SymbolicOrbit((), ("0",)), SymbolicOrbit((), ("3",)), 0) == 1


def test_metric_rejects_irrational_and_foreign_points(full2):
    sp = PointSet(("a", "b"), ((0, 0), (F(1, 2), F(1, 2))), "euclidean")
    with pytest.raises(ValueError):
        orbit_metric(sp, SymbolicOrbit((), ("a",)), SymbolicOrbit((), ("b",)))
    with pytest.raises(ValueError):
        orbit_metric(full2, ZERO, SymbolicOrbit((), ("7",)))


def test_li_yorke_separated_fixed_points(full2):
    v = li_yorke_verdict(full2, ZERO, ONE)
    assert (v.liminf, v.limsup, v.classification, v.exact) == (1, 1, "separated", True)


def test_li_yorke_alternating(full2):
    v = li_yorke_verdict(full2, ZERO, ALT)
    assert (v.liminf, v.limsup) == (F(1, 3), F(2, 3))
    assert v.classification != "li-yorke"


def test_asymptotic_pair(full2):
    x = SymbolicOrbit(("1",), ("0",))
    assert li_yorke_verdict(full2, x, ZERO).classification == "asymptotic"
    assert dc2_verdict(full2, x, ZERO).classification == "asymptotic"


def test_dc2_means(full2):
    v = dc2_verdict(full2, ZERO, ALT)
    assert v.liminf == v.limsup == F(1, 2)
    assert dc2_verdict(full2, ZERO, ONE).liminf == 1


def test_equal_orbits_rejected(full2):
    with pytest.raises(ValueError):
        li_yorke_verdict(full2, ALT, SymbolicOrbit(("1",), ("0", "1")))
    with pytest.raises(ValueError):
        dc2_verdict(full2, ZERO, ZERO)


orbits = st.builds(lambda pre, per: SymbolicOrbit(tuple(pre), tuple(per)),
                   st.lists(st.sampled_from("01"), max_size=3),
                   st.lists(st.sampled_from("01"), min_size=1, max_size=3))


@settings(max_examples=100, deadline=None)
@given(orbits, orbits)
def test_periodic_pairs_never_chaotic(x, y):
    full2 = relation([0, 1], [(0, 0), (0, 1), (1, 0), (1, 1)])
    if x == y:
        return
    ly, dc = li_yorke_verdict(full2, x, y), dc2_verdict(full2, x, y)
    assert ly.classification in ("asymptotic", "separated")
    assert dc.classification in ("asymptotic", "separated")
    assert 0 <= ly.liminf <= dc.liminf <= ly.limsup <= 1


def test_uncountability_examples(ex11, cycle2, identity3):
    u = uncountability_test(ex11)
    assert u and u.vertex == "0"
    assert set(u.loops) == {("0", "0"), ("0", "1", "0")}
    c = uncountability_test(cycle2)
    assert not c and len(c.B) == 2
    assert len(uncountability_test(identity3).B) == 3


def test_uncountability_needs_domain_condition():
    with pytest.raises(ValueError):
        uncountability_test(relation([0, 1], [(0, 1)]))


def test_equivalence_ex11(ex11):
    rep = equivalence_report(ex11)
    assert rep.conditions == (True, True, True, True)
    assert rep.certificates["return"].k == 3
    assert rep.certificates["cycle_pair"].j == 2
    assert rep.li_yorke_chaotic and rep.dc2_chaotic


@pytest.mark.parametrize("name", ["cycle2", "identity3"])
def test_equivalence_zero(name, request):
    rep = equivalence_report(request.getfixturevalue(name))
    assert rep.conditions == (False,) * 4


def test_equivalence_raises_on_disagreement(ex11, monkeypatch):
    monkeypatch.setattr(chaos, "detect_cycle_pair", lambda G: None)
    with pytest.raises(InconsistencyError):
        equivalence_report(ex11)
    assert not equivalence_report(ex11, strict=False).consistent


def test_equivalence_needs_domain_condition():
    with pytest.raises(ValueError):
        equivalence_report(relation([0, 1], [(0, 1)]))


def test_projection_pairs(ex11, ex13, cycle2):
    pp = projection_pair_witnesses(ex11)
    assert pp.s_pair == (("0", "0"), ("0", "1"))
    assert pp.t_pair == (("0", "0"), ("1", "0"))
    pp = projection_pair_witnesses(ex13)
    assert set(pp.s_pair) == {("0", "1/2"), ("0", "1")}
    assert set(pp.t_pair) == {("1/2", "0"), ("1", "0")}
    assert projection_pair_witnesses(cycle2) is None


@settings(max_examples=80, deadline=None)
@given(relations(max_points=5))
def test_projection_pairs_whenever_positive(G):
    if not check_domain_condition(G):
        return
    rep = equivalence_report(G)
    pp = projection_pair_witnesses(G)
    assert (pp is not None) == rep.cond1_entropy_positive
    if pp:
        (a, b), (c, d) = pp.s_pair
        assert a == c and b != d and {(a, b), (c, d)} <= G.pairs
        (a, b), (c, d) = pp.t_pair
        assert b == d and a != c and {(a, b), (c, d)} <= G.pairs


def test_exhaustive_sweep_two_points():
    s = exhaustive_sweep([0, 1])
    assert s.relations == 16 and s.disagreements == ()
