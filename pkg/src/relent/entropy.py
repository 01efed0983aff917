"""Entropy of finite relations and grid approximations of planar relations.

For a finite relation the cover count ``N(*_{i=1}^m G^-1, alpha^{m+1})`` under a
cover by balls smaller than half the minimum distance is exactly the number of
walks with ``m`` edges, so ``ent(G)`` is the logarithm of the Perron root of
the transition matrix.  Zero entropy is decided from the strongly connected
components; positive values come with a certified Collatz-Wielandt enclosure
of the root in exact rationals.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .relation import FiniteRelation, PointSet, SchemaError, parse_rational

ENCLOSURE_TOL = 1e-9
MAX_POWER_ITER = 10_000


@dataclass(frozen=True)
class EntropyReport:
    method: str  # growth-exact | growth-bounds | grid-cover
    value: float
    lower: float
    upper: float
    per_m: tuple[tuple[int, int, float], ...] = ()
    flags: tuple[str, ...] = ()
    root_lower: Fraction | None = None
    root_upper: Fraction | None = None

    @property
    def positive(self) -> bool:
        return self.value > 0

    def to_json(self) -> dict:
        out = {
            "method": self.method,
            "value": self.value,
            "lower": self.lower,
            "upper": self.upper,
            "flags": list(self.flags),
            "per_m": [{"m": m, "N_m": str(n), "rate": r} for m, n, r in self.per_m],
        }
        if self.root_lower is not None:
            out["perron_root"] = {"lower": str(self.root_lower), "upper": str(self.root_upper)}
        return out

    def per_m_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["m", "N_m", "rate"])
        for m, n, r in self.per_m:
            w.writerow([m, n, repr(r)])
        return buf.getvalue()


def _rate(count: int, m: int) -> float:
    # an empty product is covered by one member, so its cover count is 1
    return math.log(count) / m if count > 0 else 0.0


def _log_root(r: Fraction) -> float:
    return math.log(r) if r > 1 else 0.0


# ---------------------------------------------------------------------------
# Perron root enclosure


def _collatz_wielandt(rows: Sequence[Sequence[int]], x: Sequence[Fraction]) -> tuple[Fraction, Fraction]:
    """Exact ``min_i (Mx)_i/x_i`` and ``max_i (Mx)_i/x_i`` for positive ``x``."""
    ratios = [sum((x[j] for j in row), Fraction(0)) / x[i] for i, row in enumerate(rows)]
    return min(ratios), max(ratios)


def _float_bounds(M: np.ndarray, x: np.ndarray) -> tuple[float, float]:
    r = (M @ x) / x
    return float(r.min()), float(r.max())


def perron_enclosure(M: np.ndarray, tol: float = ENCLOSURE_TOL,
                     max_iter: int = MAX_POWER_ITER) -> tuple[Fraction, Fraction]:
    """Certified bracket for the Perron root of an irreducible 0/1 matrix.

    Power iteration runs on ``M + I`` (primitive even when ``M`` is periodic);
    the bracket itself is evaluated in exact arithmetic, so it is valid for
    whatever positive vector the floating-point iteration ends on.
    """
    M = np.asarray(M, dtype=float)
    s = M.shape[0]
    rows = [tuple(np.nonzero(M[i])[0].tolist()) for i in range(s)]
    B = M + np.eye(s)
    x = np.ones(s)
    for _ in range(max_iter):
        y = B @ x
        y /= y.max()
        x = y
        lo, hi = _float_bounds(M, x)
        if hi - lo < tol / 100:
            break
    if not np.all(x > 0):
        w, v = np.linalg.eig(M)
        x = np.abs(np.real(v[:, int(np.argmax(np.real(w)))]))
        x[x <= 0] = 1e-300
    xq = [Fraction(float(v)) for v in x]
    return _collatz_wielandt(rows, xq)


def _block(G: FiniteRelation, comp: Sequence[int]) -> np.ndarray:
    pos = {v: i for i, v in enumerate(comp)}
    M = np.zeros((len(comp), len(comp)))
    for u in comp:
        for v in G.successors[u]:
            if v in pos:
                M[pos[u], pos[v]] = 1.0
    return M


def component_roots(G: FiniteRelation) -> list[tuple[tuple[int, ...], str, Fraction, Fraction]]:
    """Per SCC: (members, kind, root lower, root upper); kind is trivial/cycle/branching."""
    out = []
    for comp in G.components:
        edges = G.component_edge_count(comp)
        if edges == 0:
            out.append((comp, "trivial", Fraction(0), Fraction(0)))
        elif edges == len(comp):
            out.append((comp, "cycle", Fraction(1), Fraction(1)))
        else:
            M = _block(G, comp)
            # intersecting the brackets of M and M^T makes G and G^-1 agree bit for bit
            lo1, hi1 = perron_enclosure(M)
            lo2, hi2 = perron_enclosure(M.T)
            out.append((comp, "branching", max(lo1, lo2), min(hi1, hi2)))
    return out


def has_positive_entropy_structure(G: FiniteRelation) -> bool:
    """Some SCC carries more edges than vertices (two distinct cycles through one vertex)."""
    return any(G.component_edge_count(c) > len(c) for c in G.components)


# ---------------------------------------------------------------------------
# finite relations


def entropy_exact(G: FiniteRelation) -> EntropyReport:
    if not G.pairs:
        return EntropyReport("growth-exact", 0.0, 0.0, 0.0, flags=("empty-relation",),
                             root_lower=Fraction(0), root_upper=Fraction(0))
    roots = component_roots(G)
    lo = max(r[2] for r in roots)
    hi = max(r[3] for r in roots)
    if not any(kind == "branching" for _, kind, _, _ in roots):
        return EntropyReport("growth-exact", 0.0, 0.0, 0.0, flags=("structural-zero",),
                             root_lower=lo, root_upper=hi)
    mid = (lo + hi) / 2
    return EntropyReport("growth-exact", math.log(mid), _log_root(lo), math.log(hi),
                         root_lower=lo, root_upper=hi)


def walk_counts(G: FiniteRelation, m_max: int) -> list[int]:
    """``[N_1, ..., N_{m_max}]`` by repeated vector products."""
    counts = [1] * G.n
    out = []
    preds = G.predecessors
    for _ in range(m_max):
        counts = [sum(counts[u] for u in preds[v]) for v in range(G.n)]
        out.append(sum(counts))
    return out


def subadditivity_violations(counts: Sequence[int]) -> list[tuple[int, int]]:
    """Pairs ``(m, n)`` with ``N_{m+n} > N_m * N_n`` (1-based, within range)."""
    bad = []
    L = len(counts)
    for m in range(1, L + 1):
        for n in range(1, L + 1 - m):
            if counts[m + n - 1] > counts[m - 1] * counts[n - 1]:
                bad.append((m, n))
    return bad


def _ratio_lower_root(G: FiniteRelation, comp: Sequence[int], m: int) -> Fraction:
    """Collatz-Wielandt lower bound using the walk-count vector ``A_C^m 1``."""
    members = set(comp)
    x = {v: 1 for v in comp}
    for _ in range(m):
        x = {u: sum(x[v] for v in G.successors[u] if v in members) for u in comp}
    ratios = []
    for u in comp:
        if x[u] > 0:
            ax = sum(x[v] for v in G.successors[u] if v in members)
            ratios.append(Fraction(ax, x[u]))
    return min(ratios) if ratios else Fraction(0)


def entropy_growth_bounds(G: FiniteRelation, m_max: int) -> EntropyReport:
    """Fekete bracket: ``upper = min_m log(N_m)/m``; ``lower`` from count-vector ratios."""
    if m_max < 2:
        raise ValueError("m_max must be at least 2")
    counts = walk_counts(G, m_max)
    per_m = []
    best = math.inf
    for m, c in enumerate(counts, start=1):
        r = _rate(c, m)
        best = min(best, r)
        per_m.append((m, c, r))
    root_lo = Fraction(0)
    for comp in G.components:
        edges = G.component_edge_count(comp)
        if edges == 0:
            continue
        if edges == len(comp):
            root_lo = max(root_lo, Fraction(1))
        else:
            root_lo = max(root_lo, _ratio_lower_root(G, comp, m_max))
    lower = min(_log_root(root_lo), best)
    flags = ("empty-relation",) if not G.pairs else ()
    return EntropyReport("growth-bounds", (lower + best) / 2, lower, best, tuple(per_m),
                         flags=flags, root_lower=root_lo)


# ---------------------------------------------------------------------------
# grid relations


@dataclass(frozen=True)
class GridRelation:
    """Union of closed boxes ``[i/n,(i+1)/n] x [j/n,(j+1)/n]`` over ``cells``."""

    n: int
    cells: frozenset = field(default_factory=frozenset)

    def __post_init__(self):
        if not isinstance(self.n, int) or self.n < 1:
            raise ValueError("resolution must be a positive integer")
        cells = frozenset((int(i), int(j)) for i, j in self.cells)
        if not cells:
            raise ValueError("a grid relation needs at least one cell")
        for i, j in cells:
            if not (0 <= i < self.n and 0 <= j < self.n):
                raise ValueError(f"cell ({i},{j}) outside 0..{self.n - 1}")
        object.__setattr__(self, "cells", cells)

    def interval_relation(self) -> FiniteRelation:
        """Finite relation on the ``n`` column intervals; a walk is an admissible cell word."""
        ids = tuple(str(i) for i in range(self.n))
        coords = tuple((Fraction(2 * i + 1, 2 * self.n),) for i in range(self.n))
        space = PointSet(ids, coords)
        return FiniteRelation(space, frozenset((str(i), str(j)) for i, j in self.cells))

    def to_text(self) -> str:
        lines = [str(self.n)] + [f"{i} {j}" for i, j in sorted(self.cells)]
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "GridRelation":
        lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
        if not lines:
            raise SchemaError("grid", "empty mask file")
        try:
            n = int(lines[0])
            cells = [tuple(int(t) for t in ln.split()) for ln in lines[1:]]
        except ValueError as exc:
            raise SchemaError("grid", str(exc)) from None
        if any(len(c) != 2 for c in cells):
            raise SchemaError("grid", "each cell line needs exactly two indices")
        try:
            return cls(n, frozenset(cells))
        except ValueError as exc:
            raise SchemaError("grid", str(exc)) from None


def grid_entropy_estimate(R: GridRelation, m: int, max_m: int = 10_000) -> EntropyReport:
    """Cell-word counts ``N_1..N_m`` and the Perron-root limit of the cell graph.

    Closed boxes over-count walks of the relation, so both the rates and the
    limit are upper estimates for the fattened grid cover.
    """
    if m < 1:
        raise ValueError("m must be at least 1")
    if m > max_m:
        raise ValueError(f"m={m} exceeds the count budget of {max_m}")
    rel = R.interval_relation()
    counts = walk_counts(rel, m)
    per_m = tuple((k, c, _rate(c, k)) for k, c in enumerate(counts, start=1))
    exact = entropy_exact(rel)
    flags = ("upper-estimate",) + exact.flags
    return EntropyReport("grid-cover", exact.value, exact.lower, exact.upper, per_m,
                         flags=flags, root_lower=exact.root_lower, root_upper=exact.root_upper)


Segment = tuple[tuple[Fraction, Fraction], tuple[Fraction, Fraction]]


def _clip(seg: Segment, box: tuple[Fraction, Fraction, Fraction, Fraction]) -> tuple[Fraction, Fraction] | None:
    """Parameter interval of the segment inside a closed box (Liang-Barsky, exact)."""
    (x0, y0), (x1, y1) = seg
    bx0, bx1, by0, by1 = box
    t0, t1 = Fraction(0), Fraction(1)
    for p, d, lo, hi in ((x0, x1 - x0, bx0, bx1), (y0, y1 - y0, by0, by1)):
        if d == 0:
            if p < lo or p > hi:
                return None
            continue
        a, b = (lo - p) / d, (hi - p) / d
        if a > b:
            a, b = b, a
        t0, t1 = max(t0, a), min(t1, b)
        if t0 > t1:
            return None
    return t0, t1


def grid_from_piecewise_linear(segments: Iterable, n: int) -> GridRelation:
    """Cells whose closed box meets some segment in a piece of positive length."""
    if n < 2:
        raise ValueError("resolution must be at least 2")
    segs = []
    for s in segments:
        (x0, y0), (x1, y1) = s
        seg = ((Fraction(x0), Fraction(y0)), (Fraction(x1), Fraction(y1)))
        if seg[0] == seg[1]:
            raise ValueError(f"degenerate segment {seg}")
        if not all(0 <= c <= 1 for pt in seg for c in pt):
            raise ValueError(f"segment {seg} leaves the unit square")
        segs.append(seg)
    cells = set()
    for seg in segs:
        (x0, y0), (x1, y1) = seg
        i_lo, i_hi = max(0, math.floor(min(x0, x1) * n) - 1), min(n - 1, math.floor(max(x0, x1) * n))
        j_lo, j_hi = max(0, math.floor(min(y0, y1) * n) - 1), min(n - 1, math.floor(max(y0, y1) * n))
        for i in range(i_lo, i_hi + 1):
            for j in range(j_lo, j_hi + 1):
                box = (Fraction(i, n), Fraction(i + 1, n), Fraction(j, n), Fraction(j + 1, n))
                t = _clip(seg, box)
                if t is not None and t[1] > t[0]:
                    cells.add((i, j))
    return GridRelation(n, frozenset(cells))


def tent_segments() -> list[Segment]:
    """Graph of ``f(x) = 2x`` on ``[0,1/2]`` and ``2 - 2x`` on ``[1/2,1]``."""
    half = Fraction(1, 2)
    return [((Fraction(0), Fraction(0)), (half, Fraction(1))),
            ((half, Fraction(1)), (Fraction(1), Fraction(0)))]


def identity_segments() -> list[Segment]:
    return [((Fraction(0), Fraction(0)), (Fraction(1), Fraction(1)))]


def two_line_segments(a, b) -> list[Segment]:
    """``{y = a x} U {y = x / b}`` clipped to the unit square."""
    a, b = parse_rational(a), parse_rational(b)
    if not (0 < a < 1 and 0 < b < 1):
        raise ValueError("a and b must lie in (0,1)")
    zero = (Fraction(0), Fraction(0))
    return [(zero, (Fraction(1), a)), (zero, (b, Fraction(1)))]


def diagonal_grid(n: int) -> GridRelation:
    return GridRelation(n, frozenset((i, i) for i in range(n)))


def full_grid(n: int) -> GridRelation:
    return GridRelation(n, frozenset((i, j) for i in range(n) for j in range(n)))
