"""
common.py — helpers shared by the command modules: input loading, output
formatting and catalog names for factors.
"""

import argparse
import json

from services import catalog, expressions, poset_io
from services.factorization import canonical_key
from services.poset_core import Polytope, is_isomorphic, make_polytope
from services.products import ProductKind

OP_CHOICES = ["join", "cart", "dsum", "topo"]


# ---------------------------------------------------------------------------
# Arguments and input
# ---------------------------------------------------------------------------

def add_source_arguments(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("expr", nargs="?", help='polytope expression, e.g. "prism(gon(5))"')
    parser.add_argument("--file", metavar="PATH", help="read a JSON face poset instead of an expression")
    parser.add_argument("--json", action="store_true", help="print the report as JSON")


def source_label(args: argparse.Namespace) -> str:
    return f"file {args.file}" if args.file else args.expr


def load_poset(args: argparse.Namespace):
    if args.file and args.expr:
        raise ValueError("give either an expression or --file, not both")
    if not args.file and not args.expr:
        raise ValueError("an expression or --file is required")
    if args.file:
        return poset_io.load(args.file)
    return None


def load_polytope(args: argparse.Namespace, power_kind: ProductKind = ProductKind.CARTESIAN) -> Polytope:
    """The polytope named by the command line; raises NotAPolytope for an invalid --file."""
    poset = load_poset(args)
    if poset is not None:
        return make_polytope(poset)
    return expressions.evaluate(expressions.parse(args.expr), power_kind)


def kind_of(args: argparse.Namespace) -> ProductKind:
    return ProductKind.from_name(args.op)


# ---------------------------------------------------------------------------
# Output
# ---------------------------------------------------------------------------

def emit(args: argparse.Namespace, data: dict, lines: list[str]) -> None:
    if args.json:
        print(json.dumps(data, indent=2))
    else:
        print("\n".join(lines))


def table(rows: list[list[str]], indent: str = "  ") -> list[str]:
    """Left-aligned columns separated by two spaces."""
    if not rows:
        return []
    widths = [max(len(row[c]) for row in rows) for c in range(len(rows[0]))]
    return [
        (indent + "  ".join(cell.ljust(w) for cell, w in zip(row, widths))).rstrip()
        for row in rows
    ]


def yes_no(value: bool) -> str:
    return "yes" if value else "no"


# ---------------------------------------------------------------------------
# Factor names
# ---------------------------------------------------------------------------

def _int_root(value: int, k: int) -> int | None:
    if k < 1 or value < 1:
        return None
    root = round(value ** (1 / k))
    for c in (root - 1, root, root + 1):
        if c >= 1 and c ** k == value:
            return c
    return None


def _candidates(q: Polytope) -> list[catalog.CatalogSpec]:
    n = q.rank
    f = q.f_vector
    out = []
    if n == 0:
        out.append(catalog.CatalogSpec("point"))
    elif n == 1:
        out.append(catalog.CatalogSpec("edge"))
    elif n == 2:
        out.append(catalog.CatalogSpec("gon", (f[0],)))
    if n >= 1:
        out.append(catalog.CatalogSpec("simplex", (n,)))
        out.append(catalog.CatalogSpec("cube", (n,)))
        out.append(catalog.CatalogSpec("cross", (n,)))
    if n >= 3:
        p = _int_root(f[0], n - 1)
        if p is not None and p >= 2:
            out.append(catalog.CatalogSpec("torus", (p, n - 1)))
    return out


def _face_count(spec: catalog.CatalogSpec) -> int | None:
    n = spec.params[0] if spec.params else 0
    return {
        "point":   2,
        "edge":    4,
        "gon":     2 * n + 2,
        "simplex": 2 ** (n + 1),
        "cube":    3 ** n + 1,
        "cross":   3 ** n + 1,
    }.get(spec.kind)


def factor_name(q: Polytope) -> str:
    """The catalog name of q when it has one, else rank<n>:<hash prefix>."""
    key = canonical_key(q)
    for spec in _candidates(q):
        try:
            catalog.check_spec(spec)
        except catalog.ParameterOutOfRange:
            continue
        if _face_count(spec) not in (None, q.face_count):
            continue
        candidate = catalog.make(spec)
        if canonical_key(candidate) == key and is_isomorphic(candidate.poset, q.poset) is not None:
            return str(spec)
    return f"rank{q.rank}:{q.poset.wl_hash[:8]}"


def factor_expression(
    factors: list[tuple[Polytope, int]], kind: ProductKind, names: list[str] | None = None
) -> str:
    if not factors:
        return "(no factors)"
    names = names or [factor_name(q) for q, _ in factors]
    terms = [name if m == 1 else f"{name} ^ {m}" for name, (_, m) in zip(names, factors)]
    return f" {kind.cli_name} ".join(terms)

