"""``relent`` command line.

Exit codes: 0 success, 2 invalid input, 3 inconsistent results, 64 unknown command.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
from fractions import Fraction
from pathlib import Path

from .chaos import (InconsistencyError, dc2_verdict, equivalence_report, exhaustive_sweep,
                    li_yorke_verdict, orbit_metric, projection_pair_witnesses)
from .dispersion import (DispersionError, assemble_prefix, build_dispersion, parse_word,
                         verify_dispersion)
from .entropy import GridRelation, entropy_exact, entropy_growth_bounds, grid_entropy_estimate
from .fixtures import FIXTURES, fixture
from .relation import (BudgetExceeded, FiniteRelation, PointSet, SchemaError, SymbolicOrbit,
                       check_domain_condition, load_relation, mahavier_walks, parse_rational,
                       transition_dot)
from .returns import (check_box_condition, detect_cycle_pair, detect_well_aligned,
                      find_any_return, find_return, return_entropy_bound, two_line_return,
                      well_aligned_return)

EXIT_INVALID = 2
EXIT_INCONSISTENT = 3
EXIT_UNKNOWN = 64


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        if "argument command: invalid choice" in message:
            self.print_usage(sys.stderr)
            self.exit(EXIT_UNKNOWN, f"{self.prog}: unknown command\n")
        super().error(message)


def _emit(doc) -> None:
    print(json.dumps(doc, indent=2, default=str))


def _load(path: str):
    p = Path(path)
    if not p.exists():
        raise SchemaError("file", f"{path} does not exist")
    text = p.read_text()
    if text.lstrip().startswith("{"):
        return load_relation(text)
    return GridRelation.from_text(text)


def _relation(path: str) -> FiniteRelation:
    obj = _load(path)
    if not isinstance(obj, FiniteRelation):
        raise SchemaError("file", "expected a relation document")
    return obj


def _id_list(text: str) -> list[str]:
    return [t.strip() for t in text.split(",") if t.strip()]


# ---------------------------------------------------------------------------
# commands


def cmd_entropy(args) -> int:
    obj = _load(args.file)
    if isinstance(obj, GridRelation):
        rep = grid_entropy_estimate(obj, args.m)
    elif args.method == "bounds":
        rep = entropy_growth_bounds(obj, args.m)
    elif args.method == "enumerate":
        counts = [len(mahavier_walks(obj, m, args.budget)) for m in range(1, args.m + 1)]
        doc = {"method": "enumerate", "per_m": [{"m": m, "N_m": c} for m, c in enumerate(counts, 1)]}
        _emit(doc)
        return 0
    else:
        rep = entropy_exact(obj)
    if args.format == "csv":
        sys.stdout.write(rep.per_m_csv())
    else:
        _emit(rep.to_json())
    return 0


def cmd_returns(args) -> int:
    G = _relation(args.file)
    if args.cycle_pair:
        c = detect_cycle_pair(G)
        _emit(c.to_json() if c else {"result": "none"})
        return 0
    if args.well_aligned:
        w = detect_well_aligned(G)
        if w is None:
            _emit({"result": "none"})
        else:
            doc = w.to_json()
            doc["return"] = well_aligned_return(G, w).to_json()
            _emit(doc)
        return 0
    if args.box:
        J = [tuple(w) for w in json.loads(args.box[0])]
        K = [tuple(w) for w in json.loads(args.box[1])]
        _emit(check_box_condition(G, J, K, args.k).to_json())
        return 0
    if args.auto:
        res = find_any_return(G)
    else:
        if not (args.set and args.k and args.eps):
            raise SchemaError("arguments", "give --set, --k and --eps, or --auto")
        res = find_return(G, _id_list(args.set), args.k, args.eps)
    if res is None:
        _emit({"result": "none"})
        return 0
    doc = res.to_json()
    if res:
        doc["entropy_lower_bound"] = return_entropy_bound(G, res)
    _emit(doc)
    return 0


def cmd_two_line(args) -> int:
    T = two_line_return(args.a, args.b)
    doc = T.to_json()
    if args.x:
        w = T.witness(args.x)
        doc["witness"] = w.to_json()
        doc["witness_problems"] = T.problems(w)
    _emit(doc)
    return 0


def cmd_dispersion(args) -> int:
    G = _relation(args.file)
    D = build_dispersion(G, _id_list(args.set), args.k, args.eps, args.depth)
    if args.format == "dot":
        sys.stdout.write(D.to_dot())
        return 0
    doc = D.to_json()
    if args.word:
        doc["prefix"] = list(assemble_prefix(D, parse_word(args.word)))
    if args.verify:
        doc["verification"] = [verify_dispersion(D, m).to_json() for m in range(1, args.verify + 1)]
    _emit(doc)
    return 0


def _random_relation(rng: random.Random, max_points: int) -> FiniteRelation:
    n = rng.randint(1, max_points)
    space = PointSet.from_values([Fraction(i, max(n - 1, 1)) for i in range(n)])
    ids = space.ids
    pairs = {(a, b) for a in ids for b in ids if rng.random() < 0.35}
    return FiniteRelation(space, frozenset(pairs))


def cmd_verify(args) -> int:
    if args.exhaustive:
        pts = args.points
        values = [Fraction(i, pts - 1) for i in range(pts)] if pts > 1 else [Fraction(0)]
        s = exhaustive_sweep(values)
        _emit({"summary": s.line(), "relations": s.relations, "checked": s.checked,
               "positive_entropy": s.positive, "disagreements": [list(d) for d in s.disagreements]})
        return EXIT_INCONSISTENT if s.disagreements else 0
    if args.random:
        rng = random.Random(args.seed)
        checked = 0
        for _ in range(args.random):
            G = _random_relation(rng, 6)
            if check_domain_condition(G):
                equivalence_report(G)
                checked += 1
        _emit({"summary": f"{args.random} random relations, {checked} checked, 0 disagreements",
               "seed": args.seed})
        return 0
    if not args.file:
        raise SchemaError("arguments", "give a relation file, --exhaustive or --random")
    G = _relation(args.file)
    doc = equivalence_report(G).to_json()
    pp = projection_pair_witnesses(G)
    doc["projection_pairs"] = pp.to_json() if pp else "none"
    _emit(doc)
    return 0


def cmd_pair(args) -> int:
    G = _relation(args.file)
    x, y = SymbolicOrbit.from_json(args.x), SymbolicOrbit.from_json(args.y)
    for o in (x, y):
        if not G.is_orbit(o):
            raise SchemaError("orbit", f"{o.to_json()} is not an orbit of the relation")
    _emit({"distance": str(orbit_metric(G, x, y, 0)),
           "li_yorke": li_yorke_verdict(G, x, y).to_json(),
           "dc2": dc2_verdict(G, x, y).to_json()})
    return 0


def cmd_example(args) -> int:
    fx = fixture(args.name, n=args.n, depth=args.depth)
    if args.format == "dot" and isinstance(fx.obj, FiniteRelation):
        sys.stdout.write(transition_dot(fx.obj, fx.name))
        return 0
    if not (args.entropy or args.returns):
        _emit(fx.to_json())
        return 0
    doc = {"fixture": fx.name}
    if args.entropy:
        if isinstance(fx.obj, GridRelation):
            rep = grid_entropy_estimate(fx.obj, args.m)
        elif isinstance(fx.obj, FiniteRelation):
            rep = entropy_exact(fx.obj)
        else:
            raise SchemaError("fixture", f"{fx.name} has no entropy computation")
        if args.format == "csv":
            sys.stdout.write(rep.per_m_csv())
            return 0
        doc["entropy"] = rep.to_json()
        doc["value"] = rep.value
        ret = fx.expected.get("return")
        if isinstance(fx.obj, FiniteRelation) and ret:
            res = find_return(fx.obj, ret["A"], ret["k"], ret["epsilon"])
            doc["lower_bound"] = return_entropy_bound(fx.obj, res)
    if args.returns:
        if not isinstance(fx.obj, FiniteRelation):
            raise SchemaError("fixture", f"{fx.name} is not a finite relation")
        if args.auto:
            res = find_any_return(fx.obj)
        else:
            ret = fx.expected.get("return")
            res = find_return(fx.obj, ret["A"], ret["k"], ret["epsilon"]) if ret else None
        if args.entropy:
            doc["returns"] = res.to_json() if res else "none"
        else:
            if res is None or not res:
                print("none")
                return 0
            doc = res.to_json()
    _emit(doc)
    return 0


def cmd_export_dot(args) -> int:
    G = _relation(args.file)
    sys.stdout.write(transition_dot(G, Path(args.file).stem))
    return 0


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("json", "csv", "dot"), default=argparse.SUPPRESS)
    common.add_argument("--seed", type=int, default=argparse.SUPPRESS)
    common.add_argument("--budget", type=int, default=argparse.SUPPRESS)

    p = _Parser(prog="relent", description="Entropy, returns and dispersions of finite relations.")
    p.add_argument("--format", choices=("json", "csv", "dot"), default="json")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--budget", type=int, default=10**6, help="walk enumeration budget")
    sub = p.add_subparsers(dest="command", metavar="command", parser_class=argparse.ArgumentParser)
    sub.required = True

    s = sub.add_parser("entropy", parents=[common], help="entropy of a relation or grid file")
    s.add_argument("file")
    s.add_argument("--method", choices=("exact", "bounds", "enumerate"), default="exact")
    s.add_argument("--m", type=int, default=12)
    s.set_defaults(func=cmd_entropy)

    s = sub.add_parser("returns", parents=[common], help="(k,eps)-return search")
    s.add_argument("file")
    s.add_argument("--set")
    s.add_argument("--k", type=int)
    s.add_argument("--eps", type=parse_rational)
    s.add_argument("--auto", action="store_true")
    s.add_argument("--cycle-pair", action="store_true")
    s.add_argument("--well-aligned", action="store_true")
    s.add_argument("--box", nargs=2, metavar=("J", "K"), help="JSON walk lists (needs --k)")
    s.set_defaults(func=cmd_returns)

    s = sub.add_parser("two-line", parents=[common], help="return template for the two-line family")
    s.add_argument("--a", type=parse_rational, required=True)
    s.add_argument("--b", type=parse_rational, required=True)
    s.add_argument("--x", type=parse_rational)
    s.set_defaults(func=cmd_two_line)

    s = sub.add_parser("dispersion", parents=[common], help="build and check a dispersion tree")
    s.add_argument("file")
    s.add_argument("--set", required=True)
    s.add_argument("--k", type=int, required=True)
    s.add_argument("--eps", type=parse_rational, required=True)
    s.add_argument("--depth", type=int, required=True)
    s.add_argument("--word")
    s.add_argument("--verify", type=int, metavar="M")
    s.set_defaults(func=cmd_dispersion)

    s = sub.add_parser("verify", parents=[common], help="four-way positive-entropy check")
    s.add_argument("file", nargs="?")
    s.add_argument("--exhaustive", action="store_true")
    s.add_argument("--points", type=int, default=3)
    s.add_argument("--random", type=int, metavar="COUNT")
    s.set_defaults(func=cmd_verify)

    s = sub.add_parser("pair", parents=[common], help="Li-Yorke and DC2 verdicts for two orbits")
    s.add_argument("file")
    s.add_argument("--x", required=True)
    s.add_argument("--y", required=True)
    s.set_defaults(func=cmd_pair)

    s = sub.add_parser("example", parents=[common], help="run a named fixture")
    s.add_argument("name", choices=FIXTURES)
    s.add_argument("--entropy", action="store_true")
    s.add_argument("--returns", action="store_true")
    s.add_argument("--auto", action="store_true")
    s.add_argument("--n", type=int, default=64, help="grid resolution")
    s.add_argument("--m", type=int, default=12, help="walk counts to report")
    s.add_argument("--depth", type=int, default=8, help="truncation depth")
    s.set_defaults(func=cmd_example)

    s = sub.add_parser("export-dot", parents=[common], help="transition graph as DOT")
    s.add_argument("file")
    s.set_defaults(func=cmd_export_dot)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (InconsistencyError, DispersionError) as exc:
        print(f"relent: inconsistency: {exc}", file=sys.stderr)
        return EXIT_INCONSISTENT
    except (SchemaError, ValueError, KeyError, BudgetExceeded, json.JSONDecodeError) as exc:
        print(f"relent: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
