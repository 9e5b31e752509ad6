"""
factor.py — prime factorization under one of the four products.

  factor --op {join|cart|dsum|topo} <expr> | --file PATH

Prints one line per prime factor, `<name> ^ <multiplicity>`, e.g. `edge ^ 3` for
cube(3) under cart.  With --json the report also carries the coordinatization:
coordinates[x] lists, for face x of the input, one face id per prime factor copy
(factors expanded by multiplicity, in output order).
"""

import argparse

from commands.common import OP_CHOICES, add_source_arguments, emit, factor_expression, factor_name, kind_of, load_polytope
from services.factorization import factor


def run(args: argparse.Namespace) -> int:
    kind = kind_of(args)
    p = load_polytope(args, power_kind=kind)
    result = factor(p, kind)
    names = [factor_name(q) for q, _ in result.factors]
    text = factor_expression(result.factors, kind, names)
    data = {
        "op": kind.cli_name,
        "kind": kind.value,
        "expression": text,
        "prime": result.multiplicities == (1,),
        "factors": [
            {"name": name, "multiplicity": m, "rank": q.rank, "faces": q.face_count}
            for name, (q, m) in zip(names, result.factors)
        ],
        "coordinates": [list(t) for t in result.coordinates],
    }
    lines = [f"{name} ^ {m}" for name, (_, m) in zip(names, result.factors)]
    emit(args, data, lines or ["(no factors)"])
    return 0


def register(subparsers: argparse._SubParsersAction) -> None:
    p = subparsers.add_parser("factor", help="prime factorization under a product")
    add_source_arguments(p)
    p.add_argument("--op", choices=OP_CHOICES, required=True, help="product to factor under")
    p.set_defaults(handler=run)
