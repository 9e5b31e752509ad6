"""
info.py — polytope summary and export commands.

  info   <expr> | --file PATH              — rank, f-vector, face and flag counts, validation
  export <expr> | --file PATH [--format json|dot] [--out PATH]
"""

import argparse
import json

from commands.common import add_source_arguments, emit, load_poset, source_label, yes_no
from services import expressions, poset_io
from services.poset_core import Polytope, validate_polytope

EXIT_INVALID = 2


def run_info(args: argparse.Namespace) -> int:
    poset = load_poset(args)
    if poset is None:
        poset = expressions.evaluate(expressions.parse(args.expr)).poset
    report = validate_polytope(poset)

    data = {
        "source": source_label(args),
        "faces": len(poset),
        "valid": report.is_polytope,
        "violations": [str(v) for v in report.violations],
    }
    lines = [f"source: {data['source']}"]
    if report.is_polytope:
        p = Polytope(poset, max(poset.ranks))
        data.update({"rank": p.rank, "f_vector": list(p.f_vector), "flags": len(p.flags)})
        lines += [
            f"rank: {p.rank}",
            f"f-vector: {' '.join(str(f) for f in p.f_vector)}",
            f"faces: {len(poset)}",
            f"flags: {len(p.flags)}",
        ]
    else:
        lines.append(f"faces: {len(poset)}")
    lines.append(f"valid: {yes_no(report.is_polytope)}")
    lines += [f"violation: {v}" for v in report.violations]

    emit(args, data, lines)
    return 0 if report.is_polytope else EXIT_INVALID


def run_export(args: argparse.Namespace) -> int:
    poset = load_poset(args)
    if poset is None:
        poset = expressions.evaluate(expressions.parse(args.expr)).poset
    if args.format == "dot":
        text = poset_io.to_dot(poset, name=source_label(args))
    else:
        text = json.dumps(poset_io.to_json(poset), indent=2) + "\n"

    if args.out:
        path = poset_io.save_text(args.out, text)
        print(f"wrote {path}")
    else:
        print(text, end="")
    return 0


def register(subparsers: argparse._SubParsersAction) -> None:
    p = subparsers.add_parser("info", help="rank, f-vector, flag count and validation")
    add_source_arguments(p)
    p.set_defaults(handler=run_info)

    p = subparsers.add_parser("export", help="write the face poset as JSON or DOT")
    add_source_arguments(p)
    p.add_argument("--format", choices=["json", "dot"], default="json")
    p.add_argument("--out", metavar="PATH", help="output file (relative paths go to DATA_DIR)")
    p.set_defaults(handler=run_export)
