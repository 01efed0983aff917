"""Named example relations with their expected results."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

from .entropy import GridRelation, grid_from_piecewise_linear, tent_segments
from .relation import FiniteRelation, PointSet, inverse, relation
from .returns import TwoLineReturn, two_line_return

F = Fraction
LOG_PHI = math.log((1 + math.sqrt(5)) / 2)


@dataclass(frozen=True)
class Fixture:
    name: str
    kind: str  # relation | grid | two-line
    obj: object
    expected: dict = field(default_factory=dict)
    description: str = ""

    def to_json(self) -> dict:
        out = {"name": self.name, "kind": self.kind, "description": self.description,
               "expected": {k: _jsonable(v) for k, v in self.expected.items()}}
        if isinstance(self.obj, FiniteRelation):
            out["relation"] = self.obj.to_document()
        elif isinstance(self.obj, GridRelation):
            out["grid"] = {"n": self.obj.n, "cells": len(self.obj.cells)}
        elif isinstance(self.obj, TwoLineReturn):
            out["two_line"] = self.obj.to_json()
        return out


def _jsonable(v):
    if isinstance(v, Fraction):
        return str(v)
    if isinstance(v, dict):
        return {k: _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    return v


def final_countable_truncation(depth: int = 8) -> FiniteRelation:
    """Points ``2^-i`` (``i <= depth``) and 0; each ``a`` is followed by ``a/2`` or ``a/4``."""
    if depth < 0:
        raise ValueError("depth must be non-negative")
    values = [F(0)] + [F(1, 2**i) for i in range(depth + 1)]
    pts = set(values)
    forward = {(F(0), F(0))}
    for a in values[1:]:
        for b in (a / 2, a / 4):
            if b in pts:
                forward.add((a, b))
    space = PointSet.from_values(values)
    ids = dict(zip(values, space.ids))
    # walks follow forward steps, so G holds the reversed pairs
    return inverse(FiniteRelation(space, frozenset((ids[a], ids[b]) for a, b in forward)))


def fixture(name: str, n: int = 64, depth: int = 8) -> Fixture:
    if name == "ex11":
        G = relation([0, 1], [(0, 0), (0, 1), (1, 0)])
        return Fixture(name, "relation", G, {
            "entropy": LOG_PHI, "walk_counts": [3, 5, 8, 13],
            "return": {"A": ["1"], "k": 5, "epsilon": F(1, 2)},
            "return_bound": math.log(2) / 5, "any_return_k": 3,
        }, "two points, a loop at 0 and a 2-cycle")
    if name == "ex13":
        G = relation([0, F(1, 2), 1], [(0, F(1, 2)), (0, 1), (F(1, 2), 0), (1, 0)])
        return Fixture(name, "relation", G, {
            "entropy": math.log(2) / 2, "walk_counts": [4, 6],
            "return": {"A": ["1"], "k": 5, "epsilon": F(1, 4)},
            "return_bound": math.log(2) / 5, "any_return_k": 3,
        }, "two 2-cycles through 0")
    if name == "ex12-identity-3pt":
        G = relation([0, F(1, 2), 1], [(0, 0), (F(1, 2), F(1, 2)), (1, 1)])
        return Fixture(name, "relation", G, {"entropy": 0.0, "return": None},
                       "identity on three points")
    if name == "ex1-tent-grid":
        R = grid_from_piecewise_linear(tent_segments(), n)
        return Fixture(name, "grid", R, {
            "estimate_range": [math.log(2), math.log(2) + 0.2], "true_entropy": math.log(2),
            "return": {"A": "[0,1]", "k": 3, "epsilon": F(1, 3)},
        }, f"tent map graph discretised on a {n}x{n} grid")
    if name == "ex2-two-line":
        T = two_line_return(F(1, 2), F(7, 10))
        return Fixture(name, "two-line", T, {"m": 2, "k": 3, "epsilon": F(91, 400),
                                             "interval": [F(7, 20), F(1, 2)]},
                       "lines y = a x and y = x / b with a = 1/2, b = 7/10")
    if name == "well-aligned-ex":
        G = relation([0, F(3, 4), 1], [(0, 1), (0, F(3, 4)), (F(3, 4), 0), (1, 0)])
        return Fixture(name, "relation", G, {
            "entropy_positive": True,
            "well_aligned": {"L": [("3/4", "0")], "R": [("0", "1"), ("0", "3/4"), ("1", "0")],
                             "epsilon": F(1, 4), "N": 2},
        }, "a relation whose fibre over 0 splits into well-aligned parts")
    if name == "final-countable-trunc":
        return Fixture(name, "relation", final_countable_truncation(depth),
                       {"entropy": 0.0, "branching": depth >= 2},
                       f"halving/quartering relation truncated at 2^-{depth}")
    if name == "full-2pt":
        G = relation([0, 1], [(0, 0), (0, 1), (1, 0), (1, 1)])
        return Fixture(name, "relation", G, {"entropy": math.log(2), "walk_counts": [4, 8, 16]},
                       "full relation on two points")
    if name == "cycle-2":
        G = relation([0, 1], [(0, 1), (1, 0)])
        return Fixture(name, "relation", G, {"entropy": 0.0, "return": None, "B_size": 2},
                       "a single 2-cycle")
    raise KeyError(f"unknown fixture {name!r}; choose from {', '.join(FIXTURES)}")


FIXTURES = ("ex11", "ex13", "ex12-identity-3pt", "ex1-tent-grid", "ex2-two-line",
            "well-aligned-ex", "final-countable-trunc", "full-2pt", "cycle-2")
