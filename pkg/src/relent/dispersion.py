"""Dispersions: binary trees of return witnesses and their assembled walks.

Each node ``w`` (a nonempty binary word) holds a walk block.  The two children
of a node start at the node's last coordinate (its anchor) and separate by
more than eps at their recorded index ``j'``.  Gluing the blocks along a word
gives a prefix of an infinite walk; distinct words give eps-separated prefixes,
which is the counting step behind the ``log(2)/k`` entropy bound.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Callable, Iterable, Sequence

import numpy as np

from .relation import FiniteRelation, Walk, parse_rational, star_concat
from .returns import lexmin_witness

Word = tuple[int, ...]
# chooser(G, in_A, k, eps, anchor_index, word) -> (j, j', x_indices, y_indices) or None
Chooser = Callable[[FiniteRelation, Sequence[bool], int, Fraction, int, Word], tuple | None]


class DispersionError(RuntimeError):
    """A built dispersion violates its defining conditions."""


def lexicographic_chooser(G, in_A, k, eps, anchor, word):
    """Smallest ``(j, j', x, y)`` at the anchor; independent of the word."""
    return lexmin_witness(G, anchor, in_A, k, eps)


@dataclass(frozen=True)
class Block:
    walk: Walk
    j: int
    j_prime: int
    anchor: str

    def to_json(self) -> dict:
        return {"walk": list(self.walk), "j": self.j, "j_prime": self.j_prime, "anchor": self.anchor}


@dataclass(frozen=True)
class BinaryStream:
    """Eventually periodic 0/1 sequence ``prefix + period + period + ...``."""

    prefix: tuple[int, ...]
    period: tuple[int, ...]

    def __post_init__(self):
        if not self.period:
            raise ValueError("period must be non-empty")
        if any(b not in (0, 1) for b in self.prefix + self.period):
            raise ValueError("streams are over {0, 1}")

    def word(self, n: int) -> Word:
        out = list(self.prefix[:n])
        while len(out) < n:
            out.append(self.period[(len(out) - len(self.prefix)) % len(self.period)])
        return tuple(out)


@dataclass(frozen=True)
class Dispersion:
    G: FiniteRelation
    A: tuple[str, ...]
    k: int
    epsilon: Fraction
    depth: int
    root: str
    tree: dict

    def __len__(self) -> int:
        return len(self.tree)

    def to_json(self) -> dict:
        return {"A": list(self.A), "k": self.k, "epsilon": str(self.epsilon), "depth": self.depth,
                "root": self.root,
                "tree": {word_str(w): b.to_json() for w, b in sorted(self.tree.items(), key=_word_order)}}

    def to_dot(self) -> str:
        lines = ["digraph dispersion {", '  "root";']
        for w, b in sorted(self.tree.items(), key=_word_order):
            parent = "root" if len(w) == 1 else word_str(w[:-1])
            lines.append(f'  "{word_str(w)}" [label="{word_str(w)}: {b.walk}"];')
            lines.append(f'  "{parent}" -> "{word_str(w)}";')
        lines.append("}")
        return "\n".join(lines) + "\n"


def _word_order(item):
    return len(item[0]), item[0]


def word_str(w: Word) -> str:
    return "".join(map(str, w))


def parse_word(text: str) -> Word:
    if not text or set(text) - {"0", "1"}:
        raise ValueError(f"not a binary word: {text!r}")
    return tuple(int(c) for c in text)


def build_dispersion(G: FiniteRelation, A: Iterable[str], k: int, epsilon, depth: int,
                     chooser: Chooser | None = None, root: str | None = None) -> Dispersion:
    """Materialise the tree breadth-first down to ``depth``."""
    if depth < 1:
        raise ValueError("depth must be at least 1")
    if k < 2:
        raise ValueError("k must be at least 2")
    eps = parse_rational(epsilon)
    ix = G.space.index
    A = tuple(sorted(set(A), key=ix.__getitem__))
    if not A:
        raise ValueError("A must be non-empty")
    root = A[0] if root is None else root
    if root not in A:
        raise ValueError(f"root {root!r} is not in A")
    in_A = [False] * G.n
    for a in A:
        in_A[ix[a]] = True
    chooser = chooser or lexicographic_chooser
    cache: dict = {}

    def choose(anchor: int, word: Word):
        if chooser is lexicographic_chooser:
            if anchor not in cache:
                cache[anchor] = chooser(G, in_A, k, eps, anchor, word)
            pick = cache[anchor]
        else:
            pick = chooser(G, in_A, k, eps, anchor, word)
        if pick is None:
            raise ValueError(f"no ({k}, {eps})-return witness at a={G.space.ids[anchor]!r}")
        return pick

    tree = {}
    frontier: list[tuple[Word, int]] = [((), ix[root])]
    for _ in range(depth):
        nxt = []
        for word, anchor in frontier:
            j, jp, x, y = choose(anchor, word)
            for bit, walk in ((0, x), (1, y)):
                w = word + (bit,)
                tree[w] = Block(G.walk_ids(walk), j, jp, G.space.ids[anchor])
                nxt.append((w, walk[-1]))
        frontier = nxt
    D = Dispersion(G, A, k, eps, depth, root, tree)
    check_tree(D)
    return D


def check_tree(D: Dispersion) -> None:
    """Raise ``DispersionError`` unless every node meets the block conditions."""
    G, sp = D.G, D.G.space
    ix = sp.index
    A = set(D.A)
    for w, b in D.tree.items():
        if not 1 < b.j_prime <= b.j <= D.k or len(b.walk) != b.j:
            raise DispersionError(f"block {word_str(w)} has bad indices j={b.j}, j'={b.j_prime}")
        if not G.is_walk(b.walk) or b.walk.first != b.anchor or b.walk.last not in A:
            raise DispersionError(f"block {word_str(w)} is not a walk from its anchor into A")
        expected = D.root if len(w) == 1 else D.tree[w[:-1]].walk.last
        if b.anchor != expected:
            raise DispersionError(f"block {word_str(w)} does not start at its parent's end")
        if w[-1] == 0:
            sib = D.tree[w[:-1] + (1,)]
            if (sib.j, sib.j_prime) != (b.j, b.j_prime):
                raise DispersionError(f"siblings of {word_str(w[:-1]) or 'root'} disagree on j, j'")
            p, q = b.walk[b.j_prime - 1], sib.walk[b.j_prime - 1]
            if not sp.exceeds(ix[p], ix[q], D.epsilon):
                raise DispersionError(f"siblings of {word_str(w[:-1]) or 'root'} are not separated at j'")


def assemble_prefix(D: Dispersion, w: Sequence[int]) -> Walk:
    """Blocks along ``w`` glued end to start."""
    w = tuple(w)
    if not w:
        raise ValueError("word must be non-empty")
    if len(w) > D.depth:
        raise ValueError(f"word length {len(w)} exceeds depth {D.depth}")
    out = D.tree[w[:1]].walk
    for n in range(2, len(w) + 1):
        out = star_concat(out, D.tree[w[:n]].walk)
    return out


def stream_prefix(D: Dispersion, s: BinaryStream, n: int) -> Walk:
    return assemble_prefix(D, s.word(n))


@dataclass(frozen=True)
class DispersionReport:
    m: int
    distinct: int
    min_pairwise_separation_found: bool
    max_prefix_length: int

    def to_json(self) -> dict:
        return {"m": self.m, "distinct": self.distinct,
                "min_pairwise_separation_found": self.min_pairwise_separation_found,
                "max_prefix_length": self.max_prefix_length}


def verify_dispersion(D: Dispersion, m: int) -> DispersionReport:
    """Check that the ``2^m`` prefixes are pairwise eps-apart within ``m k`` coordinates.

    The structural check (siblings split where the words first differ) is run
    on every pair, and a metric check over all shared coordinates backs it up.
    """
    if not 1 <= m <= D.depth:
        raise ValueError(f"m must lie in 1..{D.depth}")
    words = list(product((0, 1), repeat=m))
    ix = D.G.space.index
    prefixes = [[ix[p] for p in assemble_prefix(D, w)] for w in words]
    width = max(map(len, prefixes))
    if width > m * D.k:
        raise DispersionError(f"prefix of {width} coordinates exceeds m*k = {m * D.k}")
    P = np.full((len(words), width), -1, dtype=np.int64)
    for r, row in enumerate(prefixes):
        P[r, : len(row)] = row
    n = D.G.n
    E = np.zeros((n + 1, n + 1), dtype=bool)  # last row/column: padding
    for i in range(n):
        for j in range(n):
            E[i, j] = D.G.space.exceeds(i, j, D.epsilon)
    sep = np.zeros((len(words), len(words)), dtype=bool)
    for c in range(width):
        col = P[:, c]
        sep |= E[np.ix_(col, col)]
    np.fill_diagonal(sep, True)
    bad = np.argwhere(~sep)
    if bad.size:
        a, b = bad[0]
        raise DispersionError(f"prefixes of {word_str(words[a])} and {word_str(words[b])} are not eps-separated")
    # split[r, i]: 0-based coordinate where word r separates from any word
    # that first differs from it at position i
    split = np.zeros((len(words), m), dtype=np.int64)
    for r, w in enumerate(words):
        start = 0
        for i in range(m):
            b = D.tree[w[: i + 1]]
            split[r, i] = start + b.j_prime - 1
            start += b.j - 1
    codes = np.arange(len(words))  # product() enumerates words in binary order
    diff = codes[:, None] ^ codes[None, :]
    np.fill_diagonal(diff, 1)
    first = m - np.floor(np.log2(diff)).astype(np.int64) - 1
    C = split[codes[:, None], first]
    ok = E[P[codes[:, None], C], P[codes[None, :], C]]
    np.fill_diagonal(ok, True)
    bad = np.argwhere(~ok)
    if bad.size:
        a, b = bad[0]
        raise DispersionError(f"prefixes of {word_str(words[a])} and {word_str(words[b])} "
                              f"do not split at coordinate {C[a, b] + 1}")
    return DispersionReport(m, len(words), True, width)


def countable_return_subset(D: Dispersion) -> tuple[str, ...]:
    """Anchors used by the tree: a set on which the same return persists."""
    if D.depth < 1:
        raise ValueError("depth must be at least 1")
    ix = D.G.space.index
    used = {b.anchor for b in D.tree.values()} | {b.walk.last for b in D.tree.values()}
    return tuple(sorted(used, key=ix.__getitem__))
