import math

import pytest

from relent.chaos import equivalence_report, uncountability_test
from relent.entropy import entropy_exact, grid_entropy_estimate, walk_counts
from relent.fixtures import FIXTURES, final_countable_truncation, fixture
from relent.relation import FiniteRelation, check_domain_condition
from relent.returns import detect_well_aligned, find_any_return, find_return, return_entropy_bound


@pytest.mark.parametrize("name", FIXTURES)
def test_every_fixture_loads(name):
    fx = fixture(name)
    assert fx.name == name and fx.expected
    assert fx.to_json()["name"] == name


def test_unknown_fixture():
    with pytest.raises(KeyError):
        fixture("ex99")


@pytest.mark.parametrize("name", [n for n in FIXTURES if "entropy" in fixture(n).expected])
def test_expected_entropies(name):
    fx = fixture(name)
    assert entropy_exact(fx.obj).value == pytest.approx(fx.expected["entropy"], abs=1e-9)


@pytest.mark.parametrize("name", ["ex11", "ex13", "full-2pt"])
def test_expected_walk_counts(name):
    fx = fixture(name)
    want = fx.expected["walk_counts"]
    assert walk_counts(fx.obj, len(want)) == want


@pytest.mark.parametrize("name", ["ex11", "ex13"])
def test_expected_returns(name):
    fx = fixture(name)
    r = fx.expected["return"]
    res = find_return(fx.obj, r["A"], r["k"], r["epsilon"])
    assert return_entropy_bound(fx.obj, res) == pytest.approx(fx.expected["return_bound"])
    assert find_any_return(fx.obj).k == fx.expected["any_return_k"]


@pytest.mark.parametrize("name", ["ex12-identity-3pt", "cycle-2"])
def test_expected_no_return(name):
    assert find_any_return(fixture(name).obj) is None


def test_cycle_fixture_b_set():
    fx = fixture("cycle-2")
    assert len(uncountability_test(fx.obj).B) == fx.expected["B_size"]


def test_well_aligned_fixture():
    fx = fixture("well-aligned-ex")
    want = fx.expected["well_aligned"]
    cert = detect_well_aligned(fx.obj)
    assert cert.L == set(want["L"]) and cert.R == set(want["R"])
    assert (cert.epsilon, cert.N) == (want["epsilon"], want["N"])


def test_two_line_fixture():
    fx = fixture("ex2-two-line")
    T = fx.obj
    assert (T.m, T.k, T.epsilon) == (fx.expected["m"], fx.expected["k"], fx.expected["epsilon"])
    assert list(T.interval) == fx.expected["interval"]


def test_tent_fixture_resolution():
    fx = fixture("ex1-tent-grid", n=16)
    assert fx.obj.n == 16
    lo, hi = fx.expected["estimate_range"]
    assert lo <= grid_entropy_estimate(fx.obj, 2).value <= hi


@pytest.mark.parametrize("depth", [0, 1, 2, 5, 12])
def test_truncation_shape(depth):
    G = final_countable_truncation(depth)
    assert G.n == depth + 2
    assert ("0", "0") in G.pairs
    # every transition strictly shrinks the point, except the fixed point
    for a, b in G.pairs:
        if (a, b) != ("0", "0"):
            assert G.space.coords[G.space.index[a]] < G.space.coords[G.space.index[b]]
    assert fixture("final-countable-trunc", depth=depth).expected["branching"] == (depth >= 2)


def test_truncation_is_not_domain_closed():
    # 1/16 is reached from 1/8 but has no successor, so it is in p1(G) but not p2(G)
    G = final_countable_truncation(4)
    assert not check_domain_condition(G)
    assert isinstance(G, FiniteRelation)


def test_positive_fixtures_pass_equivalence():
    for name in ("ex11", "ex13", "well-aligned-ex", "full-2pt"):
        assert equivalence_report(fixture(name).obj).conditions == (True,) * 4
    assert math.isclose(fixture("full-2pt").expected["entropy"], math.log(2))
