"""
mono.py — monodromy group command.

  mono <expr>                          — rank, flags and |M|; for an expression built
                                         with a product at its root, also the
                                         projection report under that product
  mono --op {join|cart|dsum|topo} <expr> — projection onto S_n, kernel, split verdict
  mono --structure <expr>              — structure report for prism(gon(p)),
                                         pyr(gon(p)) and topo products of polygons
"""

import argparse

from commands.common import OP_CHOICES, add_source_arguments, emit, kind_of, load_polytope
from services import expressions
from services.expressions import Atom, Binary, Expr, Power, Unary
from services.factorization import factor
from services.monodromy import (
    ExtensionReport,
    monodromy_group,
    prism_structure,
    projection_report,
    pyramid_structure,
    topo_polygons_structure,
)
from services.products import ProductKind


def _gon(node: Expr) -> int | None:
    if isinstance(node, Atom) and node.spec.kind == "gon":
        return node.spec.params[0]
    return None


def _topo_polygons(node: Expr) -> list[int] | None:
    if isinstance(node, Atom) and node.spec.kind == "torus":
        p, d = node.spec.params
        return [p] * d
    if isinstance(node, Binary) and node.kind is ProductKind.TOPOLOGICAL:
        left = _topo_polygons(node.left)
        right = _topo_polygons(node.right)
        if left is not None and right is not None:
            return left + right
        return None
    p = _gon(node)
    return [p] if p is not None else None


def structure_report(node: Expr) -> ExtensionReport:
    if isinstance(node, Unary) and node.op in ("prism", "pyr") and _gon(node.arg) is not None:
        builder = prism_structure if node.op == "prism" else pyramid_structure
        return builder(_gon(node.arg))
    polygons = _topo_polygons(node)
    if polygons is not None and len(polygons) >= 2:
        return topo_polygons_structure(polygons)
    raise ValueError("--structure needs prism(gon(p)), pyr(gon(p)) or a topo product of polygons")


def _report_lines(report: ExtensionReport) -> tuple[dict, list[str]]:
    data = {
        "monodromy_order": report.monodromy_order,
        "n": report.n,
        "image_order": report.image_order,
        "subgroups": dict(report.subgroups),
        "split": report.split.verdict.value if report.split else None,
        "inner_split": report.inner_split.verdict.value if report.inner_split else None,
        "checks": dict(report.checks),
    }
    lines = [
        f"|M|: {report.monodromy_order}",
        f"n: {report.n}",
        f"|image|: {report.image_order}",
    ]
    lines += [f"|{name}|: {order}" for name, order in report.subgroups.items()]
    if report.split is not None:
        lines.append(f"split over K: {report.split}")
    if report.inner_split is not None:
        lines.append(f"split of K over H: {report.inner_split}")
    if report.checks:
        lines.append("checks:")
        lines += [f"  {name}: {'ok' if ok else 'FAILED'}" for name, ok in report.checks.items()]
    return data, lines


_UNARY_KIND = {"pyr": ProductKind.JOIN, "prism": ProductKind.CARTESIAN, "bipyr": ProductKind.DIRECT_SUM}
_ATOM_KIND = {
    "simplex": ProductKind.JOIN,
    "cube": ProductKind.CARTESIAN,
    "cross": ProductKind.DIRECT_SUM,
    "torus": ProductKind.TOPOLOGICAL,
}


def top_level_kind(node: Expr) -> ProductKind | None:
    """The product an expression is built with at its root, if any."""
    if isinstance(node, Binary):
        return node.kind
    if isinstance(node, Unary):
        return _UNARY_KIND.get(node.op)
    if isinstance(node, Power):
        return ProductKind.CARTESIAN
    if isinstance(node, Atom):
        return _ATOM_KIND.get(node.spec.kind)
    return None


def run(args: argparse.Namespace) -> int:
    if args.structure:
        if args.file or not args.expr:
            raise ValueError("--structure needs an expression")
        data, lines = _report_lines(structure_report(expressions.parse(args.expr)))
        emit(args, data, lines)
        return 0

    if args.op:
        kind = kind_of(args)
        p = load_polytope(args, power_kind=kind)
        data, lines = _report_lines(projection_report(p, factor(p, kind)))
        emit(args, data, lines)
        return 0

    p = load_polytope(args)
    kind = top_level_kind(expressions.parse(args.expr)) if args.expr else None
    head = {"rank": p.rank, "flags": len(p.flags)}
    lines = [f"rank: {p.rank}", f"flags: {len(p.flags)}"]
    if kind is None:
        order = monodromy_group(p).order
        emit(args, {**head, "monodromy_order": order}, lines + [f"|M|: {order}"])
        return 0
    data, report_lines = _report_lines(projection_report(p, factor(p, kind)))
    emit(args, {**head, "op": kind.cli_name, **data}, lines + [f"factored under: {kind.cli_name}"] + report_lines)
    return 0


def register(subparsers: argparse._SubParsersAction) -> None:
    p = subparsers.add_parser("mono", help="monodromy group and its projection onto S_n")
    add_source_arguments(p)
    group = p.add_mutually_exclusive_group()
    group.add_argument("--op", choices=OP_CHOICES, help="product whose factorization defines the projection")
    group.add_argument("--structure", action="store_true", help="prism / pyramid / polygon-torus structure report")
    p.set_defaults(handler=run)
