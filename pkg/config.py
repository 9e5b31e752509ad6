import os

from dotenv import load_dotenv

load_dotenv()


def _env_int(name: str, default: int) -> int:
    raw = os.environ.get(name)
    if not raw:
        return default
    try:
        return int(raw)
    except ValueError:
        print(f"[config] WARNING: {name}={raw!r} is not an integer — using {default}")
        return default


# ---------------------------------------------------------------------------
# Product kinds — CLI operator names and the end faces each kind strips
# before its posets become cardinal products.
#
# "min" / "max" / "both" / None mirror poset_core.Ends.
# ---------------------------------------------------------------------------
PRODUCT_KIND_NAMES: dict[str, str] = {
    "join": "Join",
    "cart": "Cartesian",
    "dsum": "DirectSum",
    "topo": "Topological",
}

PRODUCT_STRIPPED_ENDS: dict[str, str | None] = {
    "Join":        None,
    "Cartesian":   "min",
    "DirectSum":   "max",
    "Topological": "both",
}


# ---------------------------------------------------------------------------
# Catalog atoms accepted by the expression language.
# Value = number of integer parameters the atom takes.
# ---------------------------------------------------------------------------
CATALOG_ATOMS: dict[str, int] = {
    "point":   0,
    "edge":    0,
    "gon":     1,
    "simplex": 1,
    "cube":    1,
    "cross":   1,
    "torus":   2,
}

UNARY_OPERATORS: list[str] = ["pyr", "prism", "bipyr", "dual"]


# ---------------------------------------------------------------------------
# Search budgets — overridable through the environment (.env is honoured).
# ---------------------------------------------------------------------------

# Largest atom (or seed-filter atom) count the brute-force factor oracle accepts.
ORACLE_MAX_ATOMS: int = _env_int("POLYTOPES_ORACLE_MAX_ATOMS", 14)

# find_complement enumerates whole groups; beyond this it reports a budget error.
COMPLEMENT_MAX_ELEMENTS: int = _env_int("POLYTOPES_COMPLEMENT_MAX_ELEMENTS", 1_000_000)
COMPLEMENT_MAX_NODES: int = _env_int("POLYTOPES_COMPLEMENT_MAX_NODES", 2_000_000)
COMPLEMENT_MAX_TARGET: int = 24

TOPO_POLYGONS_MAX_FLAGS: int = _env_int("POLYTOPES_TOPO_MAX_FLAGS", 10_000)

LOG_LEVEL: str = os.environ.get("POLYTOPES_LOG_LEVEL") or "WARNING"
