from fractions import Fraction
from itertools import product

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import relations
from relent.dispersion import (BinaryStream, Block, Dispersion, DispersionError, assemble_prefix,
                               build_dispersion, check_tree, countable_return_subset,
                               parse_word, stream_prefix, verify_dispersion)
from relent.relation import Walk
from relent.returns import find_any_return, find_return, lexmin_witness

F = Fraction


def test_ex11_depth3_block_count(ex11):
    D = build_dispersion(ex11, ["1"], 5, F(1, 2), 3)
    assert len(D) == 14
    level1 = {tuple(D.tree[(0,)].walk), tuple(D.tree[(1,)].walk)}
    assert level1 == {("1", "0", "1", "0", "1"), ("1", "0", "0", "0", "1")}


def example_order_chooser(G, in_A, k, eps, anchor, word):
    """Lexicographic witness with the two walks swapped."""
    j, jp, x, y = lexmin_witness(G, anchor, in_A, k, eps)
    return j, jp, y, x


def test_custom_chooser_reproduces_example_labels(ex11):
    D = build_dispersion(ex11, ["1"], 5, F(1, 2), 3, chooser=example_order_chooser)
    assert assemble_prefix(D, (0,)) == Walk(("1", "0", "1", "0", "1"))
    assert assemble_prefix(D, (1,)) == Walk(("1", "0", "0", "0", "1"))


def test_prefix_differs_at_third_coordinate(ex11):
    D = build_dispersion(ex11, ["1"], 5, F(1, 2), 3)
    a, b = assemble_prefix(D, (0,)), assemble_prefix(D, (1,))
    assert [i + 1 for i in range(5) if a[i] != b[i]] == [3]
    assert ex11.space.distance(a[2], b[2]) == 1


def test_two_block_prefix(ex11):
    D = build_dispersion(ex11, ["1"], 5, F(1, 2), 3)
    w = assemble_prefix(D, (0, 0))
    assert w.length == 8 and w.first == "1" and w.last == "1"
    assert ex11.is_walk(w)


def test_k3_depth1_siblings(ex11):
    D = build_dispersion(ex11, ["0"], 3, F(1, 2), 1)
    assert tuple(D.tree[(0,)].walk) == ("0", "0", "0")
    assert tuple(D.tree[(1,)].walk) == ("0", "1", "0")
    assert D.tree[(0,)].j_prime == 2


def test_identity_has_no_dispersion(identity3):
    with pytest.raises(ValueError, match="no"):
        build_dispersion(identity3, ["0"], 4, F(1, 4), 2)


def test_depth_validation(ex11):
    with pytest.raises(ValueError):
        build_dispersion(ex11, ["0"], 3, F(1, 2), 0)
    D = build_dispersion(ex11, ["0"], 3, F(1, 2), 2)
    with pytest.raises(ValueError):
        assemble_prefix(D, (0, 1, 0))
    with pytest.raises(ValueError):
        verify_dispersion(D, 3)


def test_verify_counts(ex11):
    D = build_dispersion(ex11, ["1"], 5, F(1, 2), 3)
    assert verify_dispersion(D, 1).distinct == 2
    rep = verify_dispersion(D, 3)
    assert rep.distinct == 8 and rep.min_pairwise_separation_found


def test_verify_pinpoints_bad_pair(ex11):
    D = build_dispersion(ex11, ["0"], 3, F(1, 2), 2)
    tree = dict(D.tree)
    tree[(1, 0)] = Block(Walk(("0", "0", "0")), 3, 2, tree[(1, 0)].anchor)
    tree[(1, 1)] = Block(Walk(("0", "0", "0")), 3, 2, tree[(1, 1)].anchor)
    broken = Dispersion(D.G, D.A, D.k, D.epsilon, D.depth, D.root, tree)
    with pytest.raises(DispersionError, match="10 and 11"):
        verify_dispersion(broken, 2)
    with pytest.raises(DispersionError):
        check_tree(broken)


def test_countable_subset(ex11):
    D = build_dispersion(ex11, ["1"], 5, F(1, 2), 3)
    assert countable_return_subset(D) == ("1",)


def alternating_chooser(G, in_A, k, eps, anchor, word):
    """Prefer witnesses ending at point 0 on even depth and point 1 on odd depth."""
    only = [i == len(word) % 2 for i in range(G.n)]
    return lexmin_witness(G, anchor, only, k, eps) or lexmin_witness(G, anchor, in_A, k, eps)


def test_countable_subset_two_anchors(ex11):
    D = build_dispersion(ex11, ["0", "1"], 5, F(1, 2), 4, chooser=alternating_chooser)
    sub = countable_return_subset(D)
    assert sub == ("0", "1")
    assert find_return(ex11, sub, 5, F(1, 2))
    for m in range(1, 5):
        assert verify_dispersion(D, m).distinct == 2**m


def test_binary_stream():
    s = BinaryStream((1,), (0, 1))
    assert s.word(6) == (1, 0, 1, 0, 1, 0)
    with pytest.raises(ValueError):
        BinaryStream((), ())
    with pytest.raises(ValueError):
        BinaryStream((2,), (0,))


def test_stream_prefix(ex11):
    D = build_dispersion(ex11, ["0"], 3, F(1, 2), 4)
    assert stream_prefix(D, BinaryStream((), (1,)), 2) == Walk(("0", "1", "0", "1", "0"))


def test_parse_word():
    assert parse_word("0110") == (0, 1, 1, 0)
    with pytest.raises(ValueError):
        parse_word("012")


def test_dot_and_json(ex11):
    D = build_dispersion(ex11, ["0"], 3, F(1, 2), 2)
    assert set(D.to_json()["tree"]) == {"0", "1", "00", "01", "10", "11"}
    assert D.to_dot().count("->") == 6


@settings(max_examples=40, deadline=None)
@given(relations(max_points=4), st.integers(1, 4))
def test_dispersions_from_found_returns(G, depth):
    res = find_any_return(G)
    if res is None:
        return
    D = build_dispersion(G, res.A, res.k, res.epsilon, depth)
    for m in range(1, depth + 1):
        assert verify_dispersion(D, m).distinct == 2**m
        for w in product((0, 1), repeat=m):
            p = assemble_prefix(D, w)
            assert m + 1 <= len(p) <= m * (res.k - 1) + 1
            assert G.is_walk(p) and p.first == D.root


@settings(max_examples=30, deadline=None)
@given(relations(max_points=4), st.data())
def test_prefixes_first_differ_inside_split_block(G, data):
    res = find_any_return(G)
    if res is None:
        return
    D = build_dispersion(G, res.A, res.k, res.epsilon, 3)
    w = data.draw(st.tuples(*[st.integers(0, 1)] * 3))
    v = data.draw(st.tuples(*[st.integers(0, 1)] * 3))
    if w == v:
        return
    i = next(n for n in range(3) if w[n] != v[n])
    pw, pv = assemble_prefix(D, w), assemble_prefix(D, v)
    start = len(assemble_prefix(D, w[:i])) - 1 if i else 0
    first = next(c for c in range(len(pw)) if pw[c] != pv[c])
    assert start < first < start + D.tree[w[: i + 1]].j
