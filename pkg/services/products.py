"""
products.py — the join, cartesian, direct-sum and topological products.

Every product is built directly on tuples of factor face ids: the face set is
filtered by the kind's membership rule, capped where the kind re-adds an end
face, and ids are assigned in lexicographic order of the tuples.  A product face
covers another iff they agree everywhere except one coordinate, where a cover of
that factor holds; the capped ends get their covers explicitly.
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass
from functools import cached_property, reduce
from typing import Sequence

from config import PRODUCT_KIND_NAMES, PRODUCT_STRIPPED_ENDS
from services.poset_core import Ends, FacePoset, Polytope, dual


class TopologicalRankTooLow(ValueError):
    pass


class EmptyOperand(ValueError):
    pass


class ProductKind(enum.Enum):
    JOIN = "Join"
    CARTESIAN = "Cartesian"
    DIRECT_SUM = "DirectSum"
    TOPOLOGICAL = "Topological"

    @classmethod
    def from_name(cls, name: str) -> ProductKind:
        """Accepts CLI operator names (join, cart, dsum, topo) or kind names."""
        value = PRODUCT_KIND_NAMES.get(name.lower(), name)
        try:
            return cls(value)
        except ValueError:
            raise ValueError(
                f"unknown product '{name}' (expected one of {', '.join(PRODUCT_KIND_NAMES)})"
            ) from None

    @property
    def cli_name(self) -> str:
        return next(k for k, v in PRODUCT_KIND_NAMES.items() if v == self.value)

    @property
    def stripped_ends(self) -> Ends:
        ends = PRODUCT_STRIPPED_ENDS[self.value]
        return Ends(ends) if ends else Ends.NONE

    def steps(self, rank: int) -> int:
        """Rank steps a factor of this rank contributes to a product flag."""
        if self is ProductKind.JOIN:
            return rank + 1
        if self is ProductKind.TOPOLOGICAL:
            return rank - 1
        return rank

    def member_ranks(self, rank: int) -> range:
        """Ranks of a factor's faces that appear in the uncapped part of the product."""
        low = 0 if self.stripped_ends.has_min else -1
        high = rank - 1 if self.stripped_ends.has_max else rank
        return range(low, high + 1)


@dataclass(frozen=True)
class ProductStructure:
    """
    A product polytope with the factor list it was built from.
    coordinates[face] is the tuple of factor face ids of that face; capped
    end faces map to the tuple of factor minima (maxima).
    """

    kind: ProductKind
    polytope: Polytope
    expanded: tuple[Polytope, ...]
    coordinates: tuple[tuple[int, ...], ...]

    @property
    def steps(self) -> tuple[int, ...]:
        return tuple(self.kind.steps(q.rank) for q in self.expanded)

    @cached_property
    def face_of(self) -> dict[tuple[int, ...], int]:
        return {t: i for i, t in enumerate(self.coordinates)}


def _check_operands(kind: ProductKind, factors: Sequence[Polytope]) -> None:
    for q in factors:
        if q.is_empty and kind is not ProductKind.JOIN:
            raise EmptyOperand(f"the empty polytope is not an operand of the {kind.value} product")
        if kind is ProductKind.TOPOLOGICAL and q.rank < 2:
            raise TopologicalRankTooLow(
                f"topological product needs operands of rank >= 2, got rank {q.rank}"
            )


def product_structure(kind: ProductKind, factors: Sequence[Polytope]) -> ProductStructure:
    """The r-ary product of factors together with its coordinatization."""
    factors = tuple(factors)
    if not factors:
        raise ValueError("a product needs at least one operand")
    _check_operands(kind, factors)

    count = len(factors)
    members = [
        [i for i, r in enumerate(q.poset.ranks) if r in kind.member_ranks(q.rank)]
        for q in factors
    ]
    tuples = list(itertools.product(*members))
    bottom = tuple(q.minimum for q in factors)
    top = tuple(q.maximum for q in factors)
    if kind.stripped_ends.has_min:
        tuples.append(bottom)
    if kind.stripped_ends.has_max:
        tuples.append(top)
    tuples.sort()
    index = {t: i for i, t in enumerate(tuples)}

    total = sum(q.rank for q in factors)
    if kind is ProductKind.JOIN:
        rank = total + count - 1
    elif kind is ProductKind.TOPOLOGICAL:
        rank = total - count + 1
    else:
        rank = total

    join_like = kind in (ProductKind.JOIN, ProductKind.DIRECT_SUM)
    ranks = []
    for t in tuples:
        if kind.stripped_ends.has_min and t == bottom:
            ranks.append(-1)
        elif kind.stripped_ends.has_max and t == top:
            ranks.append(rank)
        else:
            s = sum(q.poset.ranks[f] for q, f in zip(factors, t))
            ranks.append(s + count - 1 if join_like else s)

    covers: set[tuple[int, int]] = set()
    for t, u in index.items():
        for j, q in enumerate(factors):
            for lower in q.poset.lower_covers[t[j]]:
                below = t[:j] + (lower,) + t[j + 1:]
                l = index.get(below)
                if l is not None:
                    covers.add((u, l))
    if kind.stripped_ends.has_min:
        covers.update((u, index[bottom]) for u, r in enumerate(ranks) if r == 0)
    if kind.stripped_ends.has_max:
        covers.update((index[top], l) for l, r in enumerate(ranks) if r == rank - 1)

    poset = FacePoset(tuple(ranks), tuple(sorted(covers)))
    return ProductStructure(kind, Polytope(poset, rank), factors, tuple(tuples))


def product(kind: ProductKind, p: Polytope, q: Polytope) -> Polytope:
    return product_structure(kind, [p, q]).polytope


def power(kind: ProductKind, p: Polytope, k: int) -> Polytope:
    """Left fold of product over k copies of p."""
    if k < 1:
        raise ValueError(f"power needs k >= 1, got {k}")
    return reduce(lambda acc, _: product(kind, acc, p), range(k - 1), p)


def direct_sum_by_duality(p: Polytope, q: Polytope) -> Polytope:
    """(p* x q*)*, the definition the explicit DirectSum construction must agree with."""
    return dual(product(ProductKind.CARTESIAN, dual(p), dual(q)))


# ---------------------------------------------------------------------------
# Named constructions
# ---------------------------------------------------------------------------

def pyr(p: Polytope) -> Polytope:
    from services.catalog import point

    return product(ProductKind.JOIN, point(), p)


def pri(p: Polytope) -> Polytope:
    from services.catalog import edge

    return product(ProductKind.CARTESIAN, edge(), p)


def bipyr(p: Polytope) -> Polytope:
    from services.catalog import edge

    return product(ProductKind.DIRECT_SUM, edge(), p)
