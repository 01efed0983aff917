"""Finite metric point sets, finite relations and their Mahavier products.

A relation ``G`` on a point set ``X`` is a set of ordered pairs.  The m-th
Mahavier product of ``G^-1`` is the set of tuples ``(x_1, ..., x_{m+1})``
with ``(x_{i+1}, x_i)`` in ``G`` for every ``i``; these are exactly the walks
of length ``m`` in the *transition graph*, which has an edge ``u -> v``
whenever ``(v, u)`` is in ``G``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from itertools import combinations
from pathlib import Path
from typing import Iterable, Iterator, Mapping, Sequence, Union

import networkx as nx

METRICS = ("euclidean", "max", "absolute-difference-on-1D")
DEFAULT_WALK_BUDGET = 10**6


class SchemaError(ValueError):
    """A relation document does not match the expected layout."""

    def __init__(self, field: str, message: str):
        super().__init__(f"{field}: {message}")
        self.field = field


class BudgetExceeded(RuntimeError):
    pass


def parse_rational(text) -> Fraction:
    """Parse ``"3/4"``, ``"0.75"``, ``"1"`` (or an int/Fraction) exactly."""
    if isinstance(text, (int, Fraction)) and not isinstance(text, bool):
        return Fraction(text)
    if not isinstance(text, str):
        raise ValueError(f"expected a decimal or fraction string, got {text!r}")
    return Fraction(text.strip())


def sqrt_lower(q: Fraction, digits: int = 15) -> Fraction:
    """Exact square root of ``q`` when rational, else a rational just below it."""
    if q < 0:
        raise ValueError("negative radicand")
    rn, rd = math.isqrt(q.numerator), math.isqrt(q.denominator)
    if rn * rn == q.numerator and rd * rd == q.denominator:
        return Fraction(rn, rd)
    scale = 10**digits
    return Fraction(math.isqrt(q.numerator * scale * scale // q.denominator), scale)


# ---------------------------------------------------------------------------
# point sets


@dataclass(frozen=True)
class PointSet:
    """Finite labelled point set with exact rational coordinates."""

    ids: tuple[str, ...]
    coords: tuple[tuple[Fraction, ...], ...]
    metric: str = "absolute-difference-on-1D"

    def __post_init__(self):
        object.__setattr__(self, "ids", tuple(str(i) for i in self.ids))
        object.__setattr__(
            self, "coords", tuple(tuple(Fraction(c) for c in p) for p in self.coords)
        )
        if len(self.ids) != len(self.coords):
            raise SchemaError("points", "ids and coords differ in length")
        if len(set(self.ids)) != len(self.ids):
            dup = next(i for i in self.ids if self.ids.count(i) > 1)
            raise SchemaError("points.id", f"duplicate id {dup!r}")
        if self.metric not in METRICS:
            raise SchemaError("metric", f"unknown metric {self.metric!r}")
        dims = {len(c) for c in self.coords}
        if len(dims) > 1:
            raise SchemaError("points.coords", "points have different dimensions")
        if dims and 0 in dims:
            raise SchemaError("points.coords", "empty coordinate vector")
        if self.metric == "absolute-difference-on-1D" and dims - {1}:
            raise SchemaError("points.coords", "absolute-difference metric needs 1-D coords")
        self._check_metric()

    @classmethod
    def from_values(cls, values: Iterable, metric: str = "absolute-difference-on-1D",
                    ids: Sequence[str] | None = None) -> "PointSet":
        """1-D point set labelled by the values themselves (``"1/2"`` etc.)."""
        vals = [Fraction(v) for v in values]
        if ids is None:
            ids = [_label(v) for v in vals]
        return cls(tuple(ids), tuple((v,) for v in vals), metric)

    def _check_metric(self):
        n = len(self.ids)
        for i, j in combinations(range(n), 2):
            kij, kji = self._raw_key(i, j), self._raw_key(j, i)
            if kij != kji or kij < 0:
                raise SchemaError("metric", "metric is not symmetric and non-negative")
            if kij == 0:
                raise SchemaError(
                    "points.coords",
                    f"points {self.ids[i]!r} and {self.ids[j]!r} have equal coordinates",
                )

    def _raw_key(self, i: int, j: int) -> Fraction:
        a, b = self.coords[i], self.coords[j]
        if self.metric == "euclidean":
            return sum(((x - y) ** 2 for x, y in zip(a, b)), Fraction(0))
        return max(abs(x - y) for x, y in zip(a, b))

    def __len__(self) -> int:
        return len(self.ids)

    def __contains__(self, pid) -> bool:
        return pid in self.index

    @cached_property
    def index(self) -> dict[str, int]:
        return {pid: i for i, pid in enumerate(self.ids)}

    @cached_property
    def keys(self) -> tuple[tuple[Fraction, ...], ...]:
        """Exact comparison keys: squared distance for euclidean, distance otherwise."""
        n = len(self.ids)
        return tuple(tuple(self._raw_key(i, j) for j in range(n)) for i in range(n))

    def eps_key(self, eps) -> Fraction:
        eps = Fraction(eps)
        return eps * eps if self.metric == "euclidean" else eps

    def exceeds(self, i: int, j: int, eps) -> bool:
        """``rho(x_i, x_j) > eps`` for point indices, decided exactly."""
        return self.keys[i][j] > self.eps_key(eps)

    def distance(self, u: str, v: str):
        """Distance between two ids: a Fraction, or a float for irrational euclidean values."""
        key = self.keys[self.index[u]][self.index[v]]
        if self.metric != "euclidean":
            return key
        root = sqrt_lower(key)
        return root if root * root == key else math.sqrt(key)

    def distance_index(self, i: int, j: int):
        return self.distance(self.ids[i], self.ids[j])

    def half_distances(self) -> list[Fraction]:
        """Sorted rational thresholds ``rho/2`` over distinct positive distances."""
        out = set()
        for i, j in combinations(range(len(self.ids)), 2):
            key = self.keys[i][j]
            d = sqrt_lower(key) if self.metric == "euclidean" else key
            out.add(d / 2)
        return sorted(out)


def _label(v: Fraction) -> str:
    return str(v.numerator) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"


# ---------------------------------------------------------------------------
# walks and orbits


@dataclass(frozen=True)
class Walk:
    """Element ``(x_1, ..., x_{m+1})`` of the m-th Mahavier product, as point ids."""

    coords: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "coords", tuple(self.coords))
        if not self.coords:
            raise ValueError("a walk has at least one coordinate")

    @property
    def length(self) -> int:
        """Number of edges ``m``."""
        return len(self.coords) - 1

    def __len__(self) -> int:
        return len(self.coords)

    def __iter__(self) -> Iterator[str]:
        return iter(self.coords)

    def __getitem__(self, item):
        return self.coords[item]

    @property
    def first(self) -> str:
        return self.coords[0]

    @property
    def last(self) -> str:
        return self.coords[-1]

    def __str__(self) -> str:
        return "(" + ",".join(self.coords) + ")"


@dataclass(frozen=True, eq=False)
class SymbolicOrbit:
    """Eventually periodic element of the infinite Mahavier product.

    The sequence is ``preperiod`` followed by ``period`` repeated forever.
    Equality and hashing are by the infinite sequence, not the representation.
    """

    preperiod: tuple[str, ...]
    period: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "preperiod", tuple(str(p) for p in self.preperiod))
        object.__setattr__(self, "period", tuple(str(p) for p in self.period))
        if not self.period:
            raise ValueError("period must be non-empty")

    def coord(self, i: int) -> str:
        """1-based coordinate ``x_i``."""
        if i < 1:
            raise IndexError("coordinates are 1-based")
        if i <= len(self.preperiod):
            return self.preperiod[i - 1]
        return self.period[(i - 1 - len(self.preperiod)) % len(self.period)]

    def prefix(self, n: int) -> tuple[str, ...]:
        return tuple(self.coord(i) for i in range(1, n + 1))

    def canonical(self) -> "SymbolicOrbit":
        per = self.period
        for p in range(1, len(per) + 1):
            if len(per) % p == 0 and per[:p] * (len(per) // p) == per:
                per = per[:p]
                break
        pre = self.preperiod
        while pre and pre[-1] == per[-1]:
            per = (pre[-1],) + per[:-1]
            pre = pre[:-1]
        return SymbolicOrbit(pre, per)

    def __eq__(self, other):
        if not isinstance(other, SymbolicOrbit):
            return NotImplemented
        a, b = self.canonical(), other.canonical()
        return a.preperiod == b.preperiod and a.period == b.period

    def __hash__(self):
        c = self.canonical()
        return hash((c.preperiod, c.period))

    def to_json(self) -> dict:
        return {"preperiod": list(self.preperiod), "period": list(self.period)}

    @classmethod
    def from_json(cls, doc) -> "SymbolicOrbit":
        if isinstance(doc, str):
            doc = json.loads(doc)
        try:
            return cls(tuple(doc.get("preperiod", ())), tuple(doc["period"]))
        except (KeyError, AttributeError, TypeError) as exc:
            raise SchemaError("orbit", f"expected {{preperiod, period}}: {exc}") from None


# ---------------------------------------------------------------------------
# relations


@dataclass(frozen=True)
class FiniteRelation:
    space: PointSet
    pairs: frozenset

    def __post_init__(self):
        pairs = frozenset((str(a), str(b)) for a, b in self.pairs)
        object.__setattr__(self, "pairs", pairs)
        for a, b in pairs:
            for pid in (a, b):
                if pid not in self.space:
                    raise SchemaError("pairs", f"unknown point id {pid!r}")

    def __len__(self) -> int:
        return len(self.pairs)

    def __contains__(self, pair) -> bool:
        return tuple(pair) in self.pairs

    def __iter__(self):
        return iter(self.sorted_pairs())

    def sorted_pairs(self) -> list[tuple[str, str]]:
        ix = self.space.index
        return sorted(self.pairs, key=lambda p: (ix[p[0]], ix[p[1]]))

    def with_pairs(self, pairs: Iterable) -> "FiniteRelation":
        return FiniteRelation(self.space, frozenset(pairs))

    @property
    def n(self) -> int:
        return len(self.space)

    @cached_property
    def successors(self) -> tuple[tuple[int, ...], ...]:
        """Transition graph by index: ``successors[u]`` holds ``v`` with ``(v, u)`` in G."""
        ix = self.space.index
        out: list[list[int]] = [[] for _ in range(self.n)]
        for a, b in self.pairs:
            out[ix[b]].append(ix[a])
        return tuple(tuple(sorted(s)) for s in out)

    @cached_property
    def predecessors(self) -> tuple[tuple[int, ...], ...]:
        out: list[list[int]] = [[] for _ in range(self.n)]
        for u, vs in enumerate(self.successors):
            for v in vs:
                out[v].append(u)
        return tuple(tuple(sorted(p)) for p in out)

    def p1(self) -> frozenset:
        return frozenset(a for a, _ in self.pairs)

    def p2(self) -> frozenset:
        return frozenset(b for _, b in self.pairs)

    def step(self, u: str, v: str) -> bool:
        """True when ``v`` may follow ``u`` in a walk, i.e. ``(v, u)`` is in G."""
        return (v, u) in self.pairs

    def is_walk(self, w: Union[Walk, Sequence[str]]) -> bool:
        c = tuple(w)
        if not c or any(p not in self.space for p in c):
            return False
        return all(self.step(c[i], c[i + 1]) for i in range(len(c) - 1))

    def is_orbit(self, o: SymbolicOrbit) -> bool:
        seq = o.preperiod + o.period + o.period[:1]
        return self.is_walk(seq)

    def graph(self) -> nx.DiGraph:
        g = nx.DiGraph()
        g.add_nodes_from(range(self.n))
        for u, vs in enumerate(self.successors):
            g.add_edges_from((u, v) for v in vs)
        return g

    @cached_property
    def components(self) -> tuple[tuple[int, ...], ...]:
        """Strongly connected components of the transition graph, each sorted, ordered by min."""
        comps = [tuple(sorted(c)) for c in nx.strongly_connected_components(self.graph())]
        return tuple(sorted(comps))

    def component_edge_count(self, comp: Sequence[int]) -> int:
        members = set(comp)
        return sum(1 for u in comp for v in self.successors[u] if v in members)

    def recurrent(self) -> tuple[int, ...]:
        """Indices lying on some cycle of the transition graph."""
        out = []
        for comp in self.components:
            if self.component_edge_count(comp) > 0:
                out.extend(comp)
        return tuple(sorted(out))

    def walk_ids(self, idx: Iterable[int]) -> Walk:
        ids = self.space.ids
        return Walk(tuple(ids[i] for i in idx))

    def to_document(self) -> dict:
        pts = [
            {"id": pid, "coords": [_label(c) for c in cs]}
            for pid, cs in zip(self.space.ids, self.space.coords)
        ]
        return {"points": pts, "metric": self.space.metric,
                "pairs": [list(p) for p in self.sorted_pairs()]}


def relation(values: Iterable, pairs: Iterable, metric: str = "absolute-difference-on-1D") -> FiniteRelation:
    """Shorthand: a relation on 1-D points labelled by their values."""
    space = PointSet.from_values(values, metric)
    return FiniteRelation(space, frozenset((str(a), str(b)) for a, b in pairs))


def load_relation(document) -> FiniteRelation:
    """Validate a relation document (mapping, JSON text or path) into a FiniteRelation."""
    if isinstance(document, Path):
        document = document.read_text()
    if isinstance(document, str):
        try:
            document = json.loads(document)
        except json.JSONDecodeError as exc:
            raise SchemaError("document", f"invalid JSON: {exc}") from None
    if not isinstance(document, Mapping):
        raise SchemaError("document", "expected a JSON object")
    for key in ("points", "pairs"):
        if key not in document:
            raise SchemaError(key, "missing")
    points = document["points"]
    if not isinstance(points, list):
        raise SchemaError("points", "expected a list")
    ids, coords = [], []
    for n, p in enumerate(points):
        if not isinstance(p, Mapping) or "id" not in p or "coords" not in p:
            raise SchemaError(f"points[{n}]", "expected {id, coords}")
        if not isinstance(p["coords"], list):
            raise SchemaError(f"points[{n}].coords", "expected a list")
        try:
            coords.append(tuple(parse_rational(c) for c in p["coords"]))
        except (ValueError, ZeroDivisionError) as exc:
            raise SchemaError(f"points[{n}].coords", str(exc)) from None
        ids.append(str(p["id"]))
    metric = document.get("metric", "absolute-difference-on-1D")
    space = PointSet(tuple(ids), tuple(coords), metric)
    raw_pairs = document["pairs"]
    if not isinstance(raw_pairs, list):
        raise SchemaError("pairs", "expected a list")
    pairs = set()
    for n, pr in enumerate(raw_pairs):
        if not isinstance(pr, (list, tuple)) or len(pr) != 2:
            raise SchemaError(f"pairs[{n}]", "expected a two-element list")
        a, b = str(pr[0]), str(pr[1])
        for pid in (a, b):
            if pid not in space:
                raise SchemaError(f"pairs[{n}]", f"unknown point id {pid!r}")
        pairs.add((a, b))
    return FiniteRelation(space, frozenset(pairs))


def inverse(G: FiniteRelation) -> FiniteRelation:
    return FiniteRelation(G.space, frozenset((b, a) for a, b in G.pairs))


def check_domain_condition(G: FiniteRelation) -> bool:
    """``p_1(G) <= p_2(G)``."""
    return G.p1() <= G.p2()


def walk_count(G: FiniteRelation, m: int) -> int:
    """Number of walks with ``m`` edges (entry sum of ``A^m``), in exact integers."""
    if m < 0:
        raise ValueError("m must be non-negative")
    counts = [1] * G.n
    preds = G.predecessors
    for _ in range(m):
        counts = [sum(counts[u] for u in preds[v]) for v in range(G.n)]
    return sum(counts)


def iter_walks(G: FiniteRelation, m: int, start: Iterable[int] | None = None) -> Iterator[tuple[int, ...]]:
    """All index tuples of walks with ``m`` edges, in lexicographic order."""
    succ = G.successors
    starts = range(G.n) if start is None else start

    def extend(path):
        if len(path) == m + 1:
            yield tuple(path)
            return
        for v in succ[path[-1]]:
            path.append(v)
            yield from extend(path)
            path.pop()

    for s in starts:
        yield from extend([s])


def mahavier_walks(G: FiniteRelation, m: int, budget: int = DEFAULT_WALK_BUDGET) -> set[Walk]:
    if m < 1:
        raise ValueError("m must be at least 1")
    total = walk_count(G, m)
    if total > budget:
        raise BudgetExceeded(
            f"{total} walks of length {m} exceed the budget of {budget}; use walk_count instead"
        )
    return {G.walk_ids(w) for w in iter_walks(G, m)}


def star_concat(x: Walk, y: Walk) -> Walk:
    """``x * y``: glue two walks that share the endpoint ``x_{n+1} = y_1``."""
    if x.last != y.first:
        raise ValueError(f"cannot concatenate: {x.last!r} != {y.first!r}")
    return Walk(x.coords + y.coords[1:])


def project(w, k: int) -> str:
    """The k-th standard projection (1-based)."""
    if isinstance(w, SymbolicOrbit):
        return w.coord(k)
    if not 1 <= k <= len(w):
        raise IndexError(f"projection index {k} outside 1..{len(w)}")
    return w[k - 1]


def project_range(w, k: int, l: int) -> tuple[str, ...]:
    """``pi_[k,l]``: coordinates ``k..l`` inclusive (1-based)."""
    if not 1 <= k <= l:
        raise IndexError(f"bad projection range [{k},{l}]")
    if isinstance(w, SymbolicOrbit):
        return tuple(w.coord(i) for i in range(k, l + 1))
    if l > len(w):
        raise IndexError(f"projection index {l} outside 1..{len(w)}")
    return tuple(w.coords[k - 1:l])


def shift(o: SymbolicOrbit) -> SymbolicOrbit:
    """Drop the first coordinate."""
    if o.preperiod:
        return SymbolicOrbit(o.preperiod[1:], o.period)
    return SymbolicOrbit((), o.period[1:] + o.period[:1])


def transition_dot(G: FiniteRelation, name: str = "G") -> str:
    """DOT text of the transition graph (edge ``u -> v`` iff ``(v, u)`` in G)."""
    lines = [f'digraph "{name}" {{']
    for pid in G.space.ids:
        lines.append(f'  "{pid}";')
    ids = G.space.ids
    for u, vs in enumerate(G.successors):
        for v in vs:
            lines.append(f'  "{ids[u]}" -> "{ids[v]}";')
    lines.append("}")
    return "\n".join(lines) + "\n"
