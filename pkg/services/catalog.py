"""
catalog.py — the named polytopes used as fixtures and expression atoms.

Only the point and the polygons are written down as incidence tables; every
other family is a power of one of them under the matching product.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

from config import CATALOG_ATOMS
from services import products
from services.poset_core import FacePoset, Polytope
from services.products import ProductKind


class ParameterOutOfRange(ValueError):
    pass


@dataclass(frozen=True)
class CatalogSpec:
    kind: str
    params: tuple[int, ...] = ()

    def __str__(self) -> str:
        if not self.params:
            return self.kind
        return f"{self.kind}({','.join(str(p) for p in self.params)})"


# Smallest accepted value per parameter.
_MINIMUMS: dict[str, tuple[int, ...]] = {
    "point":   (),
    "edge":    (),
    "gon":     (2,),
    "simplex": (0,),
    "cube":    (1,),
    "cross":   (1,),
    "torus":   (2, 2),
}


def check_spec(spec: CatalogSpec) -> None:
    if spec.kind not in CATALOG_ATOMS:
        raise ParameterOutOfRange(f"unknown catalog polytope '{spec.kind}'")
    if len(spec.params) != CATALOG_ATOMS[spec.kind]:
        raise ParameterOutOfRange(
            f"{spec.kind} takes {CATALOG_ATOMS[spec.kind]} parameter(s), got {len(spec.params)}"
        )
    for value, least in zip(spec.params, _MINIMUMS[spec.kind]):
        if value < least:
            raise ParameterOutOfRange(f"{spec}: parameter {value} must be >= {least}")


@lru_cache(maxsize=None)
def point() -> Polytope:
    return Polytope(FacePoset((-1, 0), ((1, 0),)), 0)


@lru_cache(maxsize=None)
def edge() -> Polytope:
    return products.power(ProductKind.JOIN, point(), 2)


@lru_cache(maxsize=None)
def gon(p: int) -> Polytope:
    """Ids: 0 minimum, 1..p vertices, p+1..2p edges, 2p+1 maximum."""
    check_spec(CatalogSpec("gon", (p,)))
    top = 2 * p + 1
    ranks = [-1] + [0] * p + [1] * p + [2]
    covers = []
    for i in range(p):
        covers.append((1 + i, 0))
        e = p + 1 + i
        covers.append((e, 1 + i))
        covers.append((e, 1 + (i + 1) % p))
        covers.append((top, e))
    return Polytope(FacePoset(tuple(ranks), tuple(sorted(covers))), 2)


@lru_cache(maxsize=None)
def simplex(n: int) -> Polytope:
    check_spec(CatalogSpec("simplex", (n,)))
    return products.power(ProductKind.JOIN, point(), n + 1)


@lru_cache(maxsize=None)
def cube(n: int) -> Polytope:
    check_spec(CatalogSpec("cube", (n,)))
    return products.power(ProductKind.CARTESIAN, edge(), n)


@lru_cache(maxsize=None)
def cross(n: int) -> Polytope:
    check_spec(CatalogSpec("cross", (n,)))
    return products.power(ProductKind.DIRECT_SUM, edge(), n)


@lru_cache(maxsize=None)
def torus(p: int, d: int) -> Polytope:
    check_spec(CatalogSpec("torus", (p, d)))
    return products.power(ProductKind.TOPOLOGICAL, gon(p), d)


_BUILDERS = {
    "point":   point,
    "edge":    edge,
    "gon":     gon,
    "simplex": simplex,
    "cube":    cube,
    "cross":   cross,
    "torus":   torus,
}


def make(spec: CatalogSpec) -> Polytope:
    check_spec(spec)
    return _BUILDERS[spec.kind](*spec.params)
