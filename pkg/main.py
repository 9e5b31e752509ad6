"""
Polytope products toolkit.

Build abstract polytopes from expressions such as "prism(gon(5))" or
"gon(3) topo gon(4)", then factor them, count flag orbits and analyse their
monodromy groups.

Exit codes: 0 success, 1 usage or input error, 2 validation failure.
"""

import argparse
import logging
import sys

from dotenv import load_dotenv

load_dotenv()

from config import LOG_LEVEL  # noqa: E402  (after load_dotenv)
from commands import factor, info, mono, orbits  # noqa: E402
from services.poset_core import NotAPolytope  # noqa: E402

EXIT_USAGE = 1
EXIT_INVALID = 2


class _Parser(argparse.ArgumentParser):
    """argparse exits with 2 on bad usage; this tool reserves 2 for invalid polytopes."""

    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="main.py", description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    subparsers = parser.add_subparsers(dest="command", required=True, metavar="command")
    for module in (info, factor, orbits, mono):
        module.register(subparsers)
    return parser


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(
        level=getattr(logging, LOG_LEVEL.upper(), logging.WARNING),
        format="[%(name)s] %(levelname)s: %(message)s",
        stream=sys.stderr,
    )
    args = build_parser().parse_args(argv)
    try:
        return args.handler(args)
    except NotAPolytope as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INVALID
    except (ValueError, LookupError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except RuntimeError as e:
        logging.getLogger("main").error("internal consistency check failed: %s", e)
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
