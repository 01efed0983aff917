"""Orbit-pair chaos predicates and the four-way positive-entropy check.

For a finite relation with ``p1(G) <= p2(G)`` the following are decided by
separate algorithms and must agree:

1. positive entropy (Perron enclosure),
2. some (k, eps)-return exists (pair-graph search),
3. two closed walks through a common vertex (BFS),
4. uncountably many infinite walks (first-return loop counting).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import chain, combinations
from typing import Sequence

from .entropy import entropy_exact
from .relation import FiniteRelation, PointSet, SymbolicOrbit, check_domain_condition
from .returns import detect_cycle_pair, find_any_return


class InconsistencyError(RuntimeError):
    """Independent deciders disagreed on the same relation."""


# ---------------------------------------------------------------------------
# orbit metric


def _space(G) -> PointSet:
    return G.space if isinstance(G, FiniteRelation) else G


def _capped(space: PointSet, u: str, v: str) -> Fraction:
    ix = space.index
    key = space.keys[ix[u]][ix[v]]
    if key >= 1:
        return Fraction(1)
    d = space.distance(u, v)
    if not isinstance(d, Fraction):
        raise ValueError(f"distance between {u!r} and {v!r} is irrational; exact metric unavailable")
    return d


def _tail_shape(x: SymbolicOrbit, y: SymbolicOrbit) -> tuple[int, int]:
    pre = max(len(x.preperiod), len(y.preperiod))
    period = math.lcm(len(x.period), len(y.period))
    return pre, period


def orbit_metric(G, x: SymbolicOrbit, y: SymbolicOrbit, n: int = 0) -> Fraction:
    """``d(s^n x, s^n y) = sum_{i>=1} 2^-i min(rho(x_{n+i}, y_{n+i}), 1)``, exactly."""
    space = _space(G)
    for o in (x, y):
        for p in chain(o.preperiod, o.period):
            if p not in space:
                raise ValueError(f"orbit coordinate {p!r} is not a point of the space")
    if n < 0:
        raise ValueError("n must be non-negative")
    pre, L = _tail_shape(x, y)
    total = Fraction(0)
    i = 1
    while n + i <= pre:
        total += Fraction(1, 2**i) * _capped(space, x.coord(n + i), y.coord(n + i))
        i += 1
    cycle = sum(Fraction(1, 2 ** (i + r)) * _capped(space, x.coord(n + i + r), y.coord(n + i + r))
                for r in range(L))
    return total + cycle / (1 - Fraction(1, 2**L))


@dataclass(frozen=True)
class OrbitPairVerdict:
    liminf: Fraction
    limsup: Fraction
    exact: bool
    classification: str  # li-yorke | dc2 | asymptotic | separated | equal

    def to_json(self) -> dict:
        return {"liminf": str(self.liminf), "limsup": str(self.limsup), "exact": self.exact,
                "classification": self.classification}


def _distance_cycle(G, x, y) -> list[Fraction]:
    if x == y:
        raise ValueError("orbits are equal")
    pre, L = _tail_shape(x, y)
    return [orbit_metric(G, x, y, n) for n in range(pre, pre + L)]


def li_yorke_verdict(G, x: SymbolicOrbit, y: SymbolicOrbit) -> OrbitPairVerdict:
    """liminf/limsup of ``d(s^n x, s^n y)``; the series is eventually periodic."""
    cyc = _distance_cycle(G, x, y)
    lo, hi = min(cyc), max(cyc)
    if hi == 0:
        kind = "asymptotic"
    elif lo == 0:
        kind = "li-yorke"
    else:
        kind = "separated"
    return OrbitPairVerdict(lo, hi, True, kind)


def dc2_verdict(G, x: SymbolicOrbit, y: SymbolicOrbit) -> OrbitPairVerdict:
    """Cesaro means of the distance series converge to its period mean."""
    cyc = _distance_cycle(G, x, y)
    mean = sum(cyc) / len(cyc)
    kind = "asymptotic" if mean == 0 else "separated"
    return OrbitPairVerdict(mean, mean, True, kind)


# ---------------------------------------------------------------------------
# uncountability via first-return loops


@dataclass(frozen=True)
class UncountabilityResult:
    uncountable: bool
    vertex: str | None = None
    loops: tuple = ()
    B: tuple[SymbolicOrbit, ...] = ()

    def __bool__(self) -> bool:
        return self.uncountable

    def to_json(self) -> dict:
        out = {"uncountable": self.uncountable}
        if self.uncountable:
            out["vertex"] = self.vertex
            out["loops"] = [list(w) for w in self.loops]
        else:
            out["B"] = [o.to_json() for o in self.B]
        return out


def _first_return_loops(G: FiniteRelation, v: int, limit: int = 2) -> list[tuple[int, ...]]:
    """Up to ``limit`` closed walks at ``v`` of at most ``n`` edges that avoid ``v`` inside.

    ``ways[L][u]`` counts (capped at ``limit``) walks of ``L`` edges from ``u``
    to ``v`` not touching ``v`` before the end; loops are read off greedily.
    """
    n = G.n
    succ = G.successors
    ways = [[0] * n for _ in range(n + 1)]
    for u in range(n):
        ways[1][u] = 1 if v in succ[u] else 0
    for L in range(2, n + 1):
        for u in range(n):
            ways[L][u] = min(limit, sum(ways[L - 1][w] for w in succ[u] if w != v))
    loops = []

    def collect(path, L):
        if len(loops) >= limit:
            return
        u = path[-1]
        if L == 1:
            if v in succ[u]:
                loops.append(tuple(path) + (v,))
            return
        for w in succ[u]:
            if w != v and ways[L - 1][w]:
                collect(path + [w], L - 1)

    for L in range(1, n + 1):
        if ways[L][v]:
            collect([v], L)
    return loops[:limit]


def uncountability_test(G: FiniteRelation) -> UncountabilityResult:
    """Uncountable iff some vertex has two distinct first-return loops.

    Otherwise every infinite walk eventually runs around a single loop, so it
    is a shift preimage of one of the finitely many periodic orbits in ``B``.
    """
    if not check_domain_condition(G):
        raise ValueError("p1(G) is not contained in p2(G)")
    ids = G.space.ids
    B = []
    for v in range(G.n):
        loops = _first_return_loops(G, v)
        if len(loops) >= 2:
            return UncountabilityResult(True, ids[v], tuple(tuple(ids[u] for u in w) for w in loops[:2]))
        if loops:
            B.append(SymbolicOrbit((), tuple(ids[u] for u in loops[0][:-1])))
    return UncountabilityResult(False, B=tuple(B))


# ---------------------------------------------------------------------------
# equivalence engine


@dataclass(frozen=True)
class EquivalenceReport:
    cond1_entropy_positive: bool
    cond2_return_exists: bool
    cond3_cycle_pair: bool
    cond4_uncountable: bool
    certificates: dict = field(default_factory=dict)

    @property
    def conditions(self) -> tuple[bool, bool, bool, bool]:
        return (self.cond1_entropy_positive, self.cond2_return_exists,
                self.cond3_cycle_pair, self.cond4_uncountable)

    @property
    def consistent(self) -> bool:
        return len(set(self.conditions)) == 1

    @property
    def li_yorke_chaotic(self) -> bool:
        return self.cond1_entropy_positive

    @property
    def dc2_chaotic(self) -> bool:
        return self.cond1_entropy_positive

    def to_json(self) -> dict:
        return {"cond1_entropy_positive": self.cond1_entropy_positive,
                "cond2_return_exists": self.cond2_return_exists,
                "cond3_cycle_pair": self.cond3_cycle_pair,
                "cond4_uncountable": self.cond4_uncountable,
                "li_yorke_chaotic": self.li_yorke_chaotic, "dc2_chaotic": self.dc2_chaotic,
                "certificates": {k: v.to_json() for k, v in self.certificates.items()}}


def equivalence_report(G: FiniteRelation, strict: bool = True) -> EquivalenceReport:
    """Run the four deciders; with ``strict`` a disagreement raises ``InconsistencyError``."""
    if not check_domain_condition(G):
        raise ValueError("p1(G) is not contained in p2(G)")
    ent = entropy_exact(G)
    ret = find_any_return(G)
    cyc = detect_cycle_pair(G)
    unc = uncountability_test(G)
    certs = {"entropy": ent, "uncountability": unc}
    if ret is not None:
        certs["return"] = ret
    if cyc is not None:
        certs["cycle_pair"] = cyc
    report = EquivalenceReport(ent.positive, ret is not None, cyc is not None, unc.uncountable, certs)
    if strict and not report.consistent:
        raise InconsistencyError(f"deciders disagree on {sorted(G.pairs)}: {report.conditions}")
    return report


@dataclass(frozen=True)
class ProjectionPairs:
    s_pair: tuple[tuple[str, str], tuple[str, str]]  # common first coordinate
    t_pair: tuple[tuple[str, str], tuple[str, str]]  # common second coordinate

    def to_json(self) -> dict:
        return {"s_pair": [list(p) for p in self.s_pair], "t_pair": [list(p) for p in self.t_pair]}


def projection_pair_witnesses(G: FiniteRelation) -> ProjectionPairs | None:
    """Pairs of ``G`` branching forward and backward, read off a cycle pair.

    With closed walks ``x, y`` at ``c``, the walks ``x*y`` and ``y*x`` start and
    end together; where they first split they give two pairs with a common
    second coordinate, and where they last rejoin two with a common first one.
    """
    cyc = detect_cycle_pair(G)
    if cyc is None:
        return None
    X = cyc.x.coords + cyc.y.coords[1:]
    Y = cyc.y.coords + cyc.x.coords[1:]
    j1 = next(i for i in range(len(X)) if X[i] != Y[i])
    t = tuple(sorted([(X[j1], X[j1 - 1]), (Y[j1], Y[j1 - 1])]))
    j2 = max(i for i in range(len(X)) if X[i] != Y[i])
    s = tuple(sorted([(X[j2 + 1], X[j2]), (Y[j2 + 1], Y[j2])]))
    return ProjectionPairs(s, t)


# ---------------------------------------------------------------------------
# exhaustive sweep


@dataclass(frozen=True)
class SweepSummary:
    relations: int
    checked: int
    positive: int
    disagreements: tuple = ()

    def line(self) -> str:
        return f"{self.relations} relations, {len(self.disagreements)} disagreements"


def exhaustive_sweep(values: Sequence = (0, Fraction(1, 2), 1)) -> SweepSummary:
    """Every pair-subset on ``values``; those meeting the domain condition are checked."""
    space = PointSet.from_values(values)
    all_pairs = [(a, b) for a in space.ids for b in space.ids]
    total = checked = positive = 0
    bad = []
    for size in range(len(all_pairs) + 1):
        for pairs in combinations(all_pairs, size):
            total += 1
            G = FiniteRelation(space, frozenset(pairs))
            if not check_domain_condition(G):
                continue
            checked += 1
            rep = equivalence_report(G, strict=False)
            positive += rep.cond1_entropy_positive
            if not rep.consistent:
                bad.append((tuple(sorted(pairs)), rep.conditions))
    return SweepSummary(total, checked, positive, tuple(bad))
