"""(k, eps)-returns, cycle pairs, box conditions and well-aligned sets.

``G`` has a (k, eps)-return on ``A`` when every ``a`` in ``A`` starts two walks
of a common length ``j - 1 <= k - 1`` that both end in ``A`` and are more than
``eps`` apart at some coordinate ``1 < j' <= j``.  Searches run on the
synchronised pair graph (states ``(u, v, first separation index)``), so they
are polynomial in ``|X|^2 k``.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Callable, Iterable, Sequence

from .entropy import EntropyReport
from .relation import FiniteRelation, Walk, inverse, parse_rational, sqrt_lower

LOG2 = math.log(2)


@dataclass(frozen=True)
class ReturnCertificate:
    a: str
    j: int
    j_prime: int
    x: Walk
    y: Walk
    epsilon: Fraction
    k: int

    def problems(self, G: FiniteRelation, A: Iterable[str]) -> list[str]:
        """Violated conditions of the return definition (empty when valid)."""
        A = set(A)
        out = []
        if not 1 < self.j_prime <= self.j <= self.k:
            out.append(f"need 1 < j'={self.j_prime} <= j={self.j} <= k={self.k}")
        if len(self.x) != self.j or len(self.y) != self.j:
            out.append("walks must have exactly j coordinates")
            return out
        if not (G.is_walk(self.x) and G.is_walk(self.y)):
            out.append("witness is not a walk of G^-1")
        if not self.x.first == self.y.first == self.a:
            out.append("walks must start at a")
        if not {self.x.last, self.y.last} <= A:
            out.append("walks must end in A")
        sp = G.space
        ix = sp.index
        if not sp.exceeds(ix[self.x[self.j_prime - 1]], ix[self.y[self.j_prime - 1]], self.epsilon):
            out.append(f"coordinates at j'={self.j_prime} are not more than eps apart")
        return out

    def to_json(self) -> dict:
        return {"a": self.a, "j": self.j, "j_prime": self.j_prime, "x": list(self.x),
                "y": list(self.y), "epsilon": str(self.epsilon), "k": self.k}


@dataclass(frozen=True)
class ReturnResult:
    """Outcome of a return search; truthy iff every point of ``A`` has a witness."""

    A: tuple[str, ...]
    k: int
    epsilon: Fraction
    certificates: tuple[ReturnCertificate, ...]
    missing: str | None = None

    def __bool__(self) -> bool:
        return self.missing is None

    def to_json(self) -> dict:
        if self.missing is not None:
            return {"result": "none", "missing": self.missing, "k": self.k,
                    "epsilon": str(self.epsilon), "A": list(self.A)}
        return {"result": "return", "A": list(self.A), "k": self.k,
                "epsilon": str(self.epsilon),
                "certificates": [c.to_json() for c in self.certificates]}


# ---------------------------------------------------------------------------
# pair-graph search


def _layers(G: FiniteRelation, a: int, k: int, eps) -> list[set]:
    """Reachable pair states ``(u, v, s)`` at coordinates 1..k; ``s`` is the first
    separation index or 0."""
    succ = G.successors
    ekey = G.space.eps_key(eps)
    keys = G.space.keys
    layers = [{(a, a, 0)}]
    for t in range(2, k + 1):
        nxt = set()
        for u, v, s in layers[-1]:
            for u2 in succ[u]:
                for v2 in succ[v]:
                    s2 = s or (t if keys[u2][v2] > ekey else 0)
                    nxt.add((u2, v2, s2))
        layers.append(nxt)
        if not nxt:
            break
    return layers


def _accepting(layer: set, in_A: Sequence[bool]) -> list[tuple[int, int, int]]:
    return [st for st in layer if st[2] and in_A[st[0]] and in_A[st[1]]]


def has_witness(G: FiniteRelation, a: int, in_A: Sequence[bool], k: int, eps) -> bool:
    layers = _layers(G, a, k, eps)
    return any(_accepting(layer, in_A) for layer in layers[1:])


def lexmin_witness(G: FiniteRelation, a: int, in_A: Sequence[bool], k: int, eps):
    """Lexicographically smallest ``(j, j', x, y)`` witness at ``a`` (index form), or None."""
    succ = G.successors
    keys = G.space.keys
    ekey = G.space.eps_key(eps)
    layers = _layers(G, a, k, eps)
    for idx in range(1, len(layers)):
        acc = _accepting(layers[idx], in_A)
        if acc:
            j = idx + 1
            jp = min(st[2] for st in acc)
            break
    else:
        return None

    def sep(t, s, u, v):
        return s or (t if keys[u][v] > ekey else 0)

    good = [set() for _ in range(j)]
    good[j - 1] = {st for st in acc if st[2] == jp}
    for t in range(j - 1, 0, -1):
        for u, v, s in layers[t - 1]:
            if any((u2, v2, sep(t + 1, s, u2, v2)) in good[t]
                   for u2 in succ[u] for v2 in succ[v]):
                good[t - 1].add((u, v, s))

    x = [a]
    ys = {(a, 0)}
    for t in range(1, j):
        for u2 in succ[x[-1]]:
            nxt = {(v2, sep(t + 1, s, u2, v2)) for v, s in ys for v2 in succ[v]}
            nxt = {(v2, s2) for v2, s2 in nxt if (u2, v2, s2) in good[t]}
            if nxt:
                x.append(u2)
                ys = nxt
                break

    # y is now the lexicographically smallest partner of the fixed x
    fixed = [set() for _ in range(j)]
    fixed[j - 1] = {(v, s) for (u, v, s) in good[j - 1] if u == x[j - 1]}
    for t in range(j - 1, 0, -1):
        for u, v, s in good[t - 1]:
            if u != x[t - 1]:
                continue
            if any((v2, sep(t + 1, s, x[t], v2)) in fixed[t] for v2 in succ[v]):
                fixed[t - 1].add((v, s))
    y = [a]
    s = 0
    for t in range(1, j):
        for v2 in succ[y[-1]]:
            s2 = sep(t + 1, s, x[t], v2)
            if (v2, s2) in fixed[t]:
                y.append(v2)
                s = s2
                break
    return j, jp, tuple(x), tuple(y)


def _validate(G: FiniteRelation, A: Iterable[str], k: int, eps) -> tuple[tuple[str, ...], Fraction]:
    A = tuple(A)
    if not A:
        raise ValueError("A must be non-empty")
    if k < 2:
        raise ValueError("k must be at least 2")
    eps = parse_rational(eps)
    if eps <= 0:
        raise ValueError("epsilon must be positive")
    for a in A:
        if a not in G.space:
            raise ValueError(f"unknown point id {a!r}")
    ix = G.space.index
    A = tuple(sorted(set(A), key=ix.__getitem__))
    return A, eps


def find_return(G: FiniteRelation, A: Iterable[str], k: int, epsilon) -> ReturnResult:
    """One certificate per point of ``A``, or a falsy result naming the first failure."""
    A, eps = _validate(G, A, k, epsilon)
    ix = G.space.index
    in_A = [False] * G.n
    for a in A:
        in_A[ix[a]] = True
    certs = []
    for a in A:
        w = lexmin_witness(G, ix[a], in_A, k, eps)
        if w is None:
            return ReturnResult(A, k, eps, tuple(certs), missing=a)
        j, jp, x, y = w
        certs.append(ReturnCertificate(a, j, jp, G.walk_ids(x), G.walk_ids(y), eps, k))
    return ReturnResult(A, k, eps, tuple(certs))


def maximal_return_set(G: FiniteRelation, k: int, epsilon) -> tuple[str, ...]:
    """Largest ``A`` carrying a (k, eps)-return (greatest fixed point; may be empty).

    Witness existence only improves as ``A`` grows, so the union of all valid
    sets is itself valid.
    """
    eps = parse_rational(epsilon)
    in_A = [bool(G.successors[u]) for u in range(G.n)]
    changed = True
    while changed:
        changed = False
        for u in range(G.n):
            if in_A[u] and not has_witness(G, u, in_A, k, eps):
                in_A[u] = False
                changed = True
    return tuple(G.space.ids[u] for u in range(G.n) if in_A[u])


def return_search_bound(G: FiniteRelation) -> int:
    """``k`` beyond which no new finite-relation return can appear: ``2|X| + 1``."""
    return 2 * G.n + 1


def find_any_return(G: FiniteRelation) -> ReturnResult | None:
    """Smallest ``k``, then largest quantised ``eps``, then smallest ``A`` (by size, index order)."""
    if not G.pairs or G.n < 2:
        return None
    eps_list = G.space.half_distances()
    if not maximal_return_set(G, return_search_bound(G), eps_list[0]):
        return None
    ix = G.space.index
    for k in range(2, return_search_bound(G) + 1):
        for eps in reversed(eps_list):
            top = maximal_return_set(G, k, eps)
            if not top:
                continue
            for size in range(1, len(top) + 1):
                for A in combinations(top, size):
                    res = find_return(G, A, k, eps)
                    if res:
                        return res
    raise AssertionError("maximal return set found but no subset verified")  # pragma: no cover


def return_entropy_bound(G: FiniteRelation, result: ReturnResult) -> float:
    """``log(2)/k`` after re-checking every certificate against ``G``."""
    if not result:
        raise ValueError("no return: the search failed at " + repr(result.missing))
    for c in result.certificates:
        if c.k != result.k:
            raise ValueError("certificates carry different k")
        bad = c.problems(G, result.A)
        if bad:
            raise ValueError(f"invalid certificate for {c.a!r}: {'; '.join(bad)}")
    if {c.a for c in result.certificates} != set(result.A):
        raise ValueError("certificates do not cover A")
    return LOG2 / result.k


def certifies_bound(report: EntropyReport, k: int) -> bool:
    """Exact check of ``ent(G) >= log(2)/k`` via ``root_lower**k >= 2``."""
    if report.root_lower is None:
        raise ValueError("report carries no Perron root bracket")
    return report.root_lower ** k >= 2


# ---------------------------------------------------------------------------
# cycle pairs


@dataclass(frozen=True)
class CyclePairCertificate:
    """Two closed walks at a common vertex that disagree at index ``j``."""

    x: Walk
    y: Walk
    j: int

    @property
    def k_x(self) -> int:
        return len(self.x)

    @property
    def k_y(self) -> int:
        return len(self.y)

    def problems(self, G: FiniteRelation) -> list[str]:
        out = []
        if self.k_x < 2 or self.k_y < 2:
            out.append("walks need at least one edge")
        if not (G.is_walk(self.x) and G.is_walk(self.y)):
            out.append("not walks of G^-1")
        if not self.x.last == self.x.first == self.y.first == self.y.last:
            out.append("walks must be closed at a common vertex")
        if not 1 < self.j <= min(self.k_x, self.k_y):
            out.append("j out of range")
        elif self.x[self.j - 1] == self.y[self.j - 1]:
            out.append("walks agree at j")
        return out

    def to_json(self) -> dict:
        return {"x": list(self.x), "y": list(self.y), "j": self.j}


def _path_back(G: FiniteRelation, start: int, target: int) -> list[int] | None:
    """Shortest walk ``start -> ... -> target`` (BFS); ``[start]`` when equal."""
    if start == target:
        return [start]
    prev = {start: None}
    queue = deque([start])
    while queue:
        u = queue.popleft()
        for v in G.successors[u]:
            if v in prev:
                continue
            prev[v] = u
            if v == target:
                path = [v]
                while prev[path[-1]] is not None:
                    path.append(prev[path[-1]])
                return path[::-1]
            queue.append(v)
    return None


def detect_cycle_pair(G: FiniteRelation) -> CyclePairCertificate | None:
    """A vertex ``c`` with two successors that both lead back to ``c``.

    Each walk is ``c -> successor -> shortest path home``, so it has at most
    ``|X| + 1`` coordinates.
    """
    for c in range(G.n):
        homeward = []
        for u in G.successors[c]:
            back = _path_back(G, u, c)
            if back is not None:
                homeward.append([c] + back)
                if len(homeward) == 2:
                    x, y = homeward
                    return CyclePairCertificate(G.walk_ids(x), G.walk_ids(y), 2)
    return None


# ---------------------------------------------------------------------------
# box condition


@dataclass(frozen=True)
class BoxCondition:
    holds: bool
    reason: str = ""
    epsilon: object = None
    A: tuple[str, ...] = ()
    return_epsilon: Fraction | None = None
    confirmation: ReturnResult | None = None

    def __bool__(self) -> bool:
        return self.holds

    def to_json(self) -> dict:
        if not self.holds:
            return {"result": "fails", "reason": self.reason}
        return {"result": "holds", "epsilon": str(self.epsilon), "A": list(self.A),
                "return_epsilon": str(self.return_epsilon),
                "confirmation": self.confirmation.to_json()}


def walk_set_distance_key(G: FiniteRelation, J: Sequence[Walk], K: Sequence[Walk]) -> Fraction:
    """``min_{u in J, v in K} max_i rho(u_i, v_i)`` in metric-key units."""
    ix = G.space.index
    keys = G.space.keys
    return min(max(keys[ix[p]][ix[q]] for p, q in zip(u, v)) for u in J for v in K)


def check_box_condition(G: FiniteRelation, J: Iterable[Walk], K: Iterable[Walk], k: int) -> BoxCondition:
    J, K = [Walk(tuple(w)) for w in J], [Walk(tuple(w)) for w in K]
    for w in J + K:
        if len(w) != k:
            raise ValueError(f"walk {w} has {len(w)} coordinates, expected k={k}")
        if not G.is_walk(w):
            raise ValueError(f"{w} is not a walk of G^-1")
    if not J or not K:
        return BoxCondition(False, "J and K must be non-empty")
    key = walk_set_distance_key(G, J, K)
    if key == 0:
        return BoxCondition(False, "rho(J,K) = 0")
    starts = {w.first for w in J} & {w.first for w in K}
    ends = {w.last for w in J} | {w.last for w in K}
    if not ends <= starts:
        return BoxCondition(False, "pi_k(J) U pi_k(K) is not contained in pi_1(J) & pi_1(K)")
    space = G.space
    if space.metric == "euclidean":
        d = sqrt_lower(key)
        eps = d if d * d == key else math.sqrt(key)
    else:
        d = eps = key
    ix = space.index
    A = tuple(sorted(starts, key=ix.__getitem__))
    # rho(J,K) is attained by some pair, so the strict inequality needs slack
    ret_eps = d / 2
    confirmation = find_return(G, A, k, ret_eps)
    return BoxCondition(True, "", eps, A, ret_eps, confirmation)


# ---------------------------------------------------------------------------
# well-aligned sets


@dataclass(frozen=True)
class WellAlignedCertificate:
    L: frozenset
    R: frozenset
    epsilon: object
    N: int
    reach_witnesses: dict = field(compare=False)
    orientation: str = "G"
    epsilon_key: Fraction = Fraction(0)

    @property
    def return_set(self) -> tuple[str, ...]:
        return tuple(sorted({b for _, b in self.L | self.R}))

    def to_json(self) -> dict:
        return {"orientation": self.orientation,
                "L": sorted(list(p) for p in self.L), "R": sorted(list(p) for p in self.R),
                "epsilon": str(self.epsilon), "N": self.N,
                "reach_witnesses": {t: list(w) for t, w in self.reach_witnesses.items()}}


def check_well_aligned(G: FiniteRelation, L: Iterable, R: Iterable,
                       orientation: str = "G") -> WellAlignedCertificate | None:
    """Evaluate the four well-aligned conditions for ``L, R`` inside ``G``."""
    L = frozenset(tuple(p) for p in L)
    R = frozenset(tuple(p) for p in R)
    if not L or not R or not (L | R) <= G.pairs:
        return None
    p2L, p2R = {b for _, b in L}, {b for _, b in R}
    T = p2L & p2R
    if not T:
        return None
    ix = G.space.index
    keys = G.space.keys
    worst = None
    for t in T:
        ls = [ix[a] for a, b in L if b == t]
        rs = [ix[a] for a, b in R if b == t]
        best = max(keys[l][r] for l in ls for r in rs)
        worst = best if worst is None else min(worst, best)
    if worst == 0:
        return None
    U = L | R
    p2U = {b for _, b in U}
    if not {a for a, _ in U} <= p2U:
        return None
    reach = _reach_walks(G, p2U, T)
    if reach is None:
        return None
    N = max(len(w) - 1 for w in reach.values())
    space = G.space
    if space.metric == "euclidean":
        d = sqrt_lower(worst)
        eps = d if d * d == worst else math.sqrt(worst)
    else:
        eps = worst
    return WellAlignedCertificate(L, R, eps, N, reach, orientation, worst)


def _reach_walks(G: FiniteRelation, sources: Iterable[str], T: set) -> dict | None:
    """For each source, a shortest walk with at least one edge ending in ``T``."""
    ix = G.space.index
    ids = G.space.ids
    targets = {ix[t] for t in T}
    # dist[v]: edges from v to T (0 when v in T), via reverse BFS
    dist = {v: 0 for v in targets}
    nxt: dict[int, int] = {}
    queue = deque(sorted(targets))
    while queue:
        v = queue.popleft()
        for u in G.predecessors[v]:
            if u not in dist:
                dist[u] = dist[v] + 1
                nxt[u] = v
                queue.append(u)
    out = {}
    for s in sources:
        u = ix[s]
        options = [(dist[v], v) for v in G.successors[u] if v in dist]
        if not options:
            return None
        _, v = min(options)
        walk = [u, v]
        while walk[-1] not in targets:
            walk.append(nxt[walk[-1]])
        out[s] = tuple(ids[w] for w in walk)
    return out


def _subsets(items: Sequence, min_size: int = 1):
    for size in range(min_size, len(items) + 1):
        yield from combinations(items, size)


def _well_aligned_candidates(G: FiniteRelation, exhaustive_limit: int):
    pairs = G.sorted_pairs()
    if len(pairs) <= exhaustive_limit:
        subsets = list(_subsets(pairs))
        for L in subsets:
            for R in subsets:
                yield L, R
        return
    # split every multi-point fibre: one pair against the rest of G
    for t in G.space.ids:
        fibre = [p for p in pairs if p[1] == t]
        if len(fibre) < 2:
            continue
        for p in fibre:
            rest = tuple(q for q in pairs if q != p)
            yield (p,), rest


def detect_well_aligned(G: FiniteRelation, exhaustive_limit: int = 8) -> WellAlignedCertificate | None:
    """Well-aligned ``L, R`` in ``G`` (or else in ``G^-1``) with the smallest ``N``.

    Ties go to larger eps, then smaller and index-earlier ``L``, then ``R``.
    Relations with more than ``exhaustive_limit`` pairs use the fibre-split
    heuristic only.
    """
    for orientation, H in (("G", G), ("inverse", inverse(G))):
        order = {p: n for n, p in enumerate(H.sorted_pairs())}
        best, best_key = None, None
        for L, R in _well_aligned_candidates(H, exhaustive_limit):
            cert = check_well_aligned(H, L, R, orientation)
            if cert is None:
                continue
            key = (cert.N, -cert.epsilon_key, len(L), [order[p] for p in L],
                   len(R), [order[p] for p in R])
            if best_key is None or key < best_key:
                best, best_key = cert, key
        if best is not None:
            return best
    return None


def well_aligned_return(G: FiniteRelation, cert: WellAlignedCertificate) -> ReturnResult:
    """The return a well-aligned pair forces, on ``A = p_2(L U R)``.

    A walk reaches the shared fibre set in at most ``N`` edges and then splits
    along ``L`` versus ``R``, so the witnesses need up to ``N + 2`` coordinates.
    """
    H = G if cert.orientation == "G" else inverse(G)
    d = sqrt_lower(cert.epsilon_key) if H.space.metric == "euclidean" else cert.epsilon_key
    return find_return(H, cert.return_set, cert.N + 2, d / 2)


# ---------------------------------------------------------------------------
# two-line family


@dataclass(frozen=True)
class TwoLineWitness:
    x: Fraction
    via_lower: tuple[Fraction, ...]  # second coordinate b'x
    via_upper: tuple[Fraction, ...]  # second coordinate x/a'
    j: int
    j_prime: int = 2

    def to_json(self) -> dict:
        return {"x": str(self.x), "lower": [str(v) for v in self.via_lower],
                "upper": [str(v) for v in self.via_upper], "j": self.j, "j_prime": self.j_prime}


@dataclass(frozen=True)
class TwoLineReturn:
    """Return template for ``G = {y = a x} U {y = x / b}`` on ``[0,1]``.

    When ``a > b`` the template belongs to ``G^-1``, which is the same family
    with the parameters swapped; ``a_eff <= b_eff`` are the parameters used.
    """

    a: Fraction
    b: Fraction
    a_eff: Fraction
    b_eff: Fraction
    orientation: str
    m: int
    k: int
    epsilon: Fraction

    @property
    def interval(self) -> tuple[Fraction, Fraction]:
        return self.a_eff * self.b_eff, self.a_eff

    @property
    def k_required(self) -> int:
        """Longest witness actually produced: ``m + 2`` coordinates."""
        return self.m + 2

    def step_ok(self, s: Fraction, t: Fraction) -> bool:
        """``(s, t)`` is an edge of a walk: ``t = s / a_eff`` or ``t = b_eff s`` inside [0,1]."""
        return 0 <= s <= 1 and 0 <= t <= 1 and (t * self.a_eff == s or t == self.b_eff * s)

    def witness(self, x) -> TwoLineWitness:
        x = parse_rational(x)
        lo, hi = self.interval
        if not lo <= x <= hi:
            raise ValueError(f"x={x} outside [{lo}, {hi}]")
        a, b = self.a_eff, self.b_eff
        end = b / a * x
        tail = [end]
        while tail[-1] > a:
            tail.append(b * tail[-1])
        lower = (x, b * x, *tail)
        upper = (x, x / a, *tail)
        return TwoLineWitness(x, lower, upper, len(lower))

    def problems(self, w: TwoLineWitness) -> list[str]:
        out = []
        lo, hi = self.interval
        for name, seq in (("lower", w.via_lower), ("upper", w.via_upper)):
            if seq[0] != w.x:
                out.append(f"{name} walk does not start at x")
            if not all(self.step_ok(s, t) for s, t in zip(seq, seq[1:])):
                out.append(f"{name} walk leaves the relation")
            if not lo <= seq[-1] <= hi:
                out.append(f"{name} walk does not end in [{lo}, {hi}]")
            if len(seq) != w.j:
                out.append(f"{name} walk length differs from j")
        if w.j > self.k_required:
            out.append(f"witness uses {w.j} coordinates, more than {self.k_required}")
        jp = w.j_prime
        if not abs(w.via_upper[jp - 1] - w.via_lower[jp - 1]) > self.epsilon:
            out.append("walks are not eps-separated at j'")
        return out

    def to_json(self) -> dict:
        lo, hi = self.interval
        return {"a": str(self.a), "b": str(self.b), "orientation": self.orientation,
                "a_eff": str(self.a_eff), "b_eff": str(self.b_eff), "m": self.m, "k": self.k,
                "k_required": self.k_required, "epsilon": str(self.epsilon),
                "interval": [str(lo), str(hi)]}


def two_line_return(a, b) -> TwoLineReturn:
    """``m`` least with ``b^m <= a``, ``k = m + 1``, ``eps = (1/a - b) a b / 2``."""
    a, b = parse_rational(a), parse_rational(b)
    if not (0 < a < 1 and 0 < b < 1):
        raise ValueError("a and b must lie in (0,1)")
    orientation = "G"
    a_eff, b_eff = a, b
    if a > b:
        a_eff, b_eff, orientation = b, a, "inverse"
    m = 1
    while b_eff**m > a_eff:
        m += 1
    eps = (1 / a_eff - b_eff) * a_eff * b_eff / 2
    return TwoLineReturn(a, b, a_eff, b_eff, orientation, m, m + 1, eps)
