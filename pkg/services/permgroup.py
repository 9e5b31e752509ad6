"""
permgroup.py — permutation groups on a finite point set (usually flag indices).

Order, membership, orbits, normality and pointwise stabilizers come from
sympy.combinatorics, whose Schreier-Sims is deterministic.  Composition follows
sympy: x * y applies x first, then y, which is the right action used for flags.

find_complement is a brute-force search for a subgroup C with C ∩ K = 1 and
|C| = |G/K|.  A complement maps isomorphically onto G/K, so it contains exactly
one element of each generator coset s K, with the same order as s K has in the
quotient, and products of those lifts keep their quotient orders.  Enumerating
the lifts that satisfy these conditions is therefore exhaustive.
"""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass
from functools import cached_property
from typing import Sequence

from sympy.combinatorics import Permutation, PermutationGroup

from config import COMPLEMENT_MAX_ELEMENTS, COMPLEMENT_MAX_NODES, COMPLEMENT_MAX_TARGET

log = logging.getLogger(__name__)


class DegreeMismatch(ValueError):
    pass


class NotASubgroup(ValueError):
    pass


class SearchBudgetExceeded(RuntimeError):
    pass


def perm(images: Sequence[int]) -> Permutation:
    return Permutation(list(images))


def identity(degree: int) -> Permutation:
    return Permutation(list(range(degree)))


def cycles(degree: int, *cycle_list: Sequence[int]) -> Permutation:
    """Permutation of 0..degree-1 from disjoint cycles, e.g. cycles(3, (0, 1))."""
    return Permutation([list(c) for c in cycle_list], size=degree)


@dataclass(frozen=True)
class PermGroup:
    degree: int
    generators: tuple[Permutation, ...]

    def __post_init__(self):
        for g in self.generators:
            if g.size != self.degree:
                raise DegreeMismatch(f"generator of degree {g.size} in a group of degree {self.degree}")

    @cached_property
    def sympy_group(self) -> PermutationGroup:
        gens = list(self.generators) or [identity(self.degree)]
        return PermutationGroup(gens)

    @cached_property
    def order(self) -> int:
        return int(self.sympy_group.order())


def group(degree: int, generators: Sequence[Permutation]) -> PermGroup:
    return PermGroup(degree, tuple(generators))


def group_order(g: PermGroup) -> int:
    return g.order


def contains(g: PermGroup, x: Permutation) -> bool:
    if x.size != g.degree:
        raise DegreeMismatch(f"permutation of degree {x.size} tested against degree {g.degree}")
    return bool(g.sympy_group.contains(x))


def orbits(g: PermGroup) -> list[list[int]]:
    """Orbit partition, each orbit sorted, orbits ordered by smallest point."""
    return sorted(sorted(o) for o in g.sympy_group.orbits())


def orbit(g: PermGroup, point: int) -> list[int]:
    return sorted(g.sympy_group.orbit(point))


def stabilizer(g: PermGroup, point: int) -> PermGroup:
    gens = [s for s in g.sympy_group.stabilizer(point).generators if not s.is_Identity]
    return PermGroup(g.degree, tuple(gens))


def is_abelian(g: PermGroup) -> bool:
    return bool(g.sympy_group.is_abelian)


def is_normal(g: PermGroup, sub: PermGroup) -> bool:
    if sub.degree != g.degree:
        raise DegreeMismatch(f"subgroup degree {sub.degree} differs from {g.degree}")
    for s in sub.generators:
        if not contains(g, s):
            raise NotASubgroup(f"generator {s.cyclic_form} is not in the group")
    return bool(sub.sympy_group.is_normal(g.sympy_group))


def element_order(x: Permutation) -> int:
    return int(x.order())


def kernel_of_action(g: PermGroup, action: Sequence[Sequence[int]]) -> PermGroup:
    """
    Kernel of the homomorphism sending g.generators[i] to the permutation
    action[i] of some other point set.  The generators act jointly on the
    disjoint union of both point sets; the kernel is the pointwise stabilizer of
    the appended points.
    """
    if len(action) != len(g.generators):
        raise ValueError(f"{len(action)} action images for {len(g.generators)} generators")
    extra = len(action[0]) if action else 0
    joint = [
        Permutation(list(s.array_form) + [g.degree + a for a in images])
        for s, images in zip(g.generators, action)
    ]
    if not joint:
        return PermGroup(g.degree, ())
    big = PermutationGroup(joint)
    if big.order() != g.order:
        raise ValueError("action images do not define a homomorphism")
    stab = big.pointwise_stabilizer(list(range(g.degree, g.degree + extra)))
    gens = []
    for s in stab.generators:
        restricted = Permutation(s.array_form[: g.degree])
        if not restricted.is_Identity and restricted not in gens:
            gens.append(restricted)
    return PermGroup(g.degree, tuple(gens))


# ---------------------------------------------------------------------------
# Element enumeration and complements
# ---------------------------------------------------------------------------

def _compose(x: tuple[int, ...], y: tuple[int, ...]) -> tuple[int, ...]:
    """x then y."""
    return tuple(y[i] for i in x)


def enumerate_elements(g: PermGroup, limit: int = COMPLEMENT_MAX_ELEMENTS) -> list[tuple[int, ...]]:
    """All elements as image tuples, identity first (sympy's Dimino enumeration)."""
    if g.order > limit:
        raise SearchBudgetExceeded(f"group has more than {limit} elements")
    return [tuple(x) for x in g.sympy_group.generate_dimino(af=True)]


def _generated_order(gens: list[tuple[int, ...]]) -> int:
    return int(PermutationGroup([perm(x) for x in gens]).order())


def _order_of(x: tuple[int, ...]) -> int:
    return int(Permutation(list(x)).order())


def find_complement(
    g: PermGroup,
    k: PermGroup,
    target_order: int,
    max_elements: int = COMPLEMENT_MAX_ELEMENTS,
    max_nodes: int = COMPLEMENT_MAX_NODES,
) -> PermGroup | None:
    """
    A subgroup of order target_order meeting k trivially, or None when the
    exhaustive search finds none.  Raises SearchBudgetExceeded rather than
    guessing when g is too large.
    """
    if target_order > COMPLEMENT_MAX_TARGET:
        raise ValueError(f"target order {target_order} exceeds {COMPLEMENT_MAX_TARGET}")
    if g.order != k.order * target_order:
        raise ValueError(f"|G| = {g.order} is not |K| * {target_order} = {k.order * target_order}")
    if g.order > max_elements:
        raise SearchBudgetExceeded(f"|G| = {g.order} exceeds the budget of {max_elements}")
    if target_order == 1:
        return PermGroup(g.degree, ())

    kernel = enumerate_elements(k, max_elements)
    in_kernel = set(kernel)

    def quotient_order(x: tuple[int, ...]) -> int:
        y = x
        for e in range(1, target_order + 1):
            if y in in_kernel:
                return e
            y = _compose(y, x)
        raise ValueError("k is not normal of the stated index in g")

    gens = [tuple(s.array_form) for s in g.generators]
    orders = [quotient_order(s) for s in gens]
    active = [i for i, e in enumerate(orders) if e > 1]
    candidates = []
    for i in active:
        lifts = [y for y in (_compose(gens[i], z) for z in kernel) if _order_of(y) == orders[i]]
        candidates.append(lifts)
    pair_orders = {
        (a, b): quotient_order(_compose(gens[active[a]], gens[active[b]]))
        for a, b in itertools.combinations(range(len(active)), 2)
    }
    log.debug(
        "complement search: %d coset(s), candidate counts %s",
        len(active), [len(c) for c in candidates],
    )

    nodes = 0
    chosen: list[tuple[int, ...]] = []

    def search(depth: int) -> list[tuple[int, ...]] | None:
        nonlocal nodes
        if depth == len(active):
            if _generated_order(chosen) == target_order:
                return list(chosen)
            return None
        for y in candidates[depth]:
            nodes += 1
            if nodes > max_nodes:
                raise SearchBudgetExceeded(f"complement search visited more than {max_nodes} nodes")
            if all(
                _order_of(_compose(chosen[a], y)) == pair_orders[(a, depth)]
                for a in range(depth)
            ):
                chosen.append(y)
                found = search(depth + 1)
                if found is not None:
                    return found
                chosen.pop()
        return None

    found = search(0)
    if found is None:
        return None
    return PermGroup(g.degree, tuple(perm(x) for x in found))
