"""
orbits.py — automorphism group and flag-orbit commands.

  aut <expr> | --file PATH                         — |Γ|, orbit count, regularity
  orbits --op {join|cart|dsum|topo} <expr>          — actual vs predicted orbit count
"""

import argparse

from commands.common import OP_CHOICES, add_source_arguments, emit, factor_name, kind_of, load_polytope, table, yes_no
from services import permgroup
from services.symmetry import automorphism_group, orbit_report


def run_aut(args: argparse.Namespace) -> int:
    p = load_polytope(args)
    gamma = automorphism_group(p)
    sizes = [len(o) for o in permgroup.orbits(gamma)]
    data = {
        "flags": len(p.flags),
        "order": gamma.order,
        "orbits": len(sizes),
        "orbit_sizes": sizes,
        "regular": len(sizes) == 1,
    }
    lines = [
        f"flags: {data['flags']}",
        f"|Γ|: {gamma.order}",
        f"orbits: {len(sizes)}",
        f"regular: {yes_no(data['regular'])}",
    ]
    emit(args, data, lines)
    return 0


def run_orbits(args: argparse.Namespace) -> int:
    kind = kind_of(args)
    p = load_polytope(args, power_kind=kind)
    report = orbit_report(p, kind)
    names = [factor_name(f.factor) for f in report.factors]
    data = {
        "op": kind.cli_name,
        "flags": report.flag_count,
        "order": report.group_order,
        "orbits": report.orbit_count,
        "orbit_sizes": report.orbit_sizes,
        "predicted": report.predicted,
        "predicted_order": report.predicted_group_order,
        "agrees": report.agrees,
        "factors": [
            {"name": name, "multiplicity": f.multiplicity, "orbits": f.orbits,
             "steps": f.steps, "order": f.group_order}
            for name, f in zip(names, report.factors)
        ],
    }
    rows = [["factor", "m", "k", "n", "|Γ|"]] + [
        [name, str(f.multiplicity), str(f.orbits), str(f.steps), str(f.group_order)]
        for name, f in zip(names, report.factors)
    ]
    lines = [
        f"flags: {report.flag_count}",
        f"|Γ|: {report.group_order}",
        f"orbits: {report.orbit_count}",
        f"orbit sizes: {' '.join(str(s) for s in report.orbit_sizes)}",
        f"predicted orbits: {report.predicted}",
        f"predicted |Γ|: {report.predicted_group_order}",
        "factors:",
        *table(rows),
        f"agrees: {yes_no(report.agrees)}",
    ]
    emit(args, data, lines)
    return 0


def register(subparsers: argparse._SubParsersAction) -> None:
    p = subparsers.add_parser("aut", help="automorphism group order and flag orbits")
    add_source_arguments(p)
    p.set_defaults(handler=run_aut)

    p = subparsers.add_parser("orbits", help="flag orbits against the product orbit formula")
    add_source_arguments(p)
    p.add_argument("--op", choices=OP_CHOICES, required=True, help="product to factor under")
    p.set_defaults(handler=run_orbits)
