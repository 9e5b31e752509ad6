"""
symmetry.py — flags, automorphism groups, orbit counts, and the bijection between
the flags of a product and (factor flags, adjacency sequence).

Automorphisms are stored as permutations of flag indices.  Γ(P) acts freely on
flags, so an automorphism is determined by the image of one base flag; the
extension test walks the flag graph from the base flag, mapping Φ^i to
(image of Φ)^i, and fails on the first inconsistency.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field
from typing import Sequence

from sympy.combinatorics import Permutation
from sympy.utilities.iterables import multiset_permutations

from services import permgroup
from services.factorization import FactorizationResult, factor
from services.permgroup import PermGroup
from services.poset_core import Polytope
from services.products import ProductKind, ProductStructure

Flag = tuple[int, ...]


class FlagNotOfProduct(ValueError):
    pass


def enumerate_flags(p: Polytope) -> list[Flag]:
    return list(p.flags)


def adjacent_flag(p: Polytope, flag: Flag, i: int) -> Flag:
    return p.adjacent_flag(flag, i)


# ---------------------------------------------------------------------------
# Automorphisms
# ---------------------------------------------------------------------------

def _signature(p: Polytope, flag: Flag) -> tuple[tuple[int, int], ...]:
    up = p.poset.upper_covers
    down = p.poset.lower_covers
    return tuple((len(up[f]), len(down[f])) for f in flag)


def _extend(p: Polytope, target: int) -> list[int] | None:
    """Flag images of the automorphism sending flag 0 to flag target, if it exists."""
    flags = p.flags
    adj = p.adjacency
    images = [-1] * len(flags)
    face_map = [-1] * p.face_count

    def assign(k: int, t: int) -> bool:
        images[k] = t
        for f, g in zip(flags[k], flags[t]):
            if face_map[f] == -1:
                face_map[f] = g
            elif face_map[f] != g:
                return False
        return True

    if not assign(0, target):
        return None
    queue = deque([0])
    while queue:
        k = queue.popleft()
        for row in adj:
            kk, t = row[k], row[images[k]]
            if images[kk] == -1:
                if not assign(kk, t):
                    return None
                queue.append(kk)
            elif images[kk] != t:
                return None
    if len(set(images)) != len(flags) or len(set(face_map)) != p.face_count:
        return None
    return images


def _orbit_of_base(gens: list[list[int]]) -> set[int]:
    seen = {0}
    queue = deque([0])
    while queue:
        k = queue.popleft()
        for g in gens:
            if g[k] not in seen:
                seen.add(g[k])
                queue.append(g[k])
    return seen


def automorphism_group(p: Polytope) -> PermGroup:
    """Γ(P) acting on flag indices, generated by extensions of the base flag."""
    flags = p.flags
    base = _signature(p, flags[0])
    gens: list[list[int]] = []
    reached = {0}
    for cand in range(1, len(flags)):
        if cand in reached or _signature(p, flags[cand]) != base:
            continue
        images = _extend(p, cand)
        if images is None:
            continue
        gens.append(images)
        reached = _orbit_of_base(gens)
    return PermGroup(len(flags), tuple(Permutation(g) for g in gens))


def face_permutation(p: Polytope, gamma: Permutation) -> list[int]:
    """The face map of a flag automorphism."""
    faces = [-1] * p.face_count
    for k, flag in enumerate(p.flags):
        for f, g in zip(flag, p.flags[gamma(k)]):
            faces[f] = g
    return faces


def orbit_count(p: Polytope) -> int:
    return len(permgroup.orbits(automorphism_group(p)))


def is_regular(p: Polytope) -> bool:
    return orbit_count(p) == 1


# ---------------------------------------------------------------------------
# Flags of products
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class AdjacencySequence:
    """entries[t] is the (0-based) factor whose coordinate advances at step t."""

    entries: tuple[int, ...]
    counts: tuple[int, ...]

    def __post_init__(self):
        for j, n_j in enumerate(self.counts):
            if self.entries.count(j) != n_j:
                raise FlagNotOfProduct(f"factor {j} must appear {n_j} times in {self.entries}")
        if len(self.entries) != sum(self.counts):
            raise FlagNotOfProduct(f"sequence {self.entries} has entries outside 0..{len(self.counts) - 1}")

    def __str__(self) -> str:
        return "".join(str(a + 1) for a in self.entries)


def adjacency_sequences(structure: ProductStructure) -> list[AdjacencySequence]:
    """The set 𝒜, lexicographically ordered."""
    counts = structure.steps
    letters = [j for j, n_j in enumerate(counts) for _ in range(n_j)]
    return [AdjacencySequence(tuple(s), counts) for s in multiset_permutations(letters)]


def _stepped_chain(structure: ProductStructure, flag: Flag) -> Flag:
    ends = structure.kind.stripped_ends
    lo = 1 if ends.has_min else 0
    hi = len(flag) - 1 if ends.has_max else len(flag)
    return flag[lo:hi]


def flag_decompose(
    structure: ProductStructure | FactorizationResult, flag: Flag
) -> tuple[tuple[Flag, ...], AdjacencySequence]:
    if isinstance(structure, FactorizationResult):
        structure = structure.structure
    p = structure.polytope
    if tuple(flag) not in p.flag_index:
        raise FlagNotOfProduct(f"{flag} is not a flag of the product")
    ends = structure.kind.stripped_ends
    chain = _stepped_chain(structure, tuple(flag))
    coords = [structure.coordinates[f] for f in chain]

    entries = []
    for before, after in zip(coords, coords[1:]):
        moved = [j for j, (a, b) in enumerate(zip(before, after)) if a != b]
        if len(moved) != 1:
            raise FlagNotOfProduct(f"{flag}: consecutive faces differ in {len(moved)} coordinates")
        entries.append(moved[0])

    factor_flags = []
    for j, q in enumerate(structure.expanded):
        faces = [coords[0][j]]
        for c in coords[1:]:
            if c[j] != faces[-1]:
                faces.append(c[j])
        if ends.has_min:
            faces.insert(0, q.minimum)
        if ends.has_max:
            faces.append(q.maximum)
        if tuple(faces) not in q.flag_index:
            raise FlagNotOfProduct(f"{flag}: coordinate {j} does not trace a flag of its factor")
        factor_flags.append(tuple(faces))
    return tuple(factor_flags), AdjacencySequence(tuple(entries), structure.steps)


def flag_compose(
    structure: ProductStructure | FactorizationResult,
    factor_flags: Sequence[Flag],
    sequence: AdjacencySequence,
) -> Flag:
    if isinstance(structure, FactorizationResult):
        structure = structure.structure
    p = structure.polytope
    ends = structure.kind.stripped_ends
    if len(factor_flags) != len(structure.expanded) or sequence.counts != structure.steps:
        raise FlagNotOfProduct("factor flags or sequence do not match the product's factors")
    for q, ff in zip(structure.expanded, factor_flags):
        if tuple(ff) not in q.flag_index:
            raise FlagNotOfProduct(f"{ff} is not a flag of its factor")

    start = 1 if ends.has_min else 0
    pos = [start] * len(factor_flags)
    chain = [structure.face_of[tuple(ff[start] for ff in factor_flags)]]
    for j in sequence.entries:
        pos[j] += 1
        chain.append(structure.face_of[tuple(ff[i] for ff, i in zip(factor_flags, pos))])
    if ends.has_min:
        chain.insert(0, p.minimum)
    if ends.has_max:
        chain.append(p.maximum)
    return tuple(chain)


# ---------------------------------------------------------------------------
# Orbit report
# ---------------------------------------------------------------------------

@dataclass
class FactorOrbits:
    factor: Polytope
    multiplicity: int
    orbits: int
    steps: int
    group_order: int


@dataclass
class OrbitReport:
    kind: ProductKind
    flag_count: int
    group_order: int
    orbit_sizes: list[int]
    predicted: int
    predicted_group_order: int
    factors: list[FactorOrbits] = field(default_factory=list)

    @property
    def orbit_count(self) -> int:
        return len(self.orbit_sizes)

    @property
    def agrees(self) -> bool:
        return self.orbit_count == self.predicted and self.group_order == self.predicted_group_order


def predicted_orbits(factors: Sequence[FactorOrbits]) -> int:
    """∏ k_i^m_i · (Σ m_i n_i)! / ∏ ((n_i!)^m_i · m_i!)."""
    numerator = math.factorial(sum(f.multiplicity * f.steps for f in factors))
    denominator = 1
    for f in factors:
        numerator *= f.orbits ** f.multiplicity
        denominator *= math.factorial(f.steps) ** f.multiplicity * math.factorial(f.multiplicity)
    return numerator // denominator


def predicted_group_order(factors: Sequence[FactorOrbits]) -> int:
    """∏ |Γ(Q_i)|^m_i · m_i!."""
    out = 1
    for f in factors:
        out *= f.group_order ** f.multiplicity * math.factorial(f.multiplicity)
    return out


def orbit_report(p: Polytope, kind: ProductKind) -> OrbitReport:
    gamma = automorphism_group(p)
    sizes = [len(o) for o in permgroup.orbits(gamma)]
    result = factor(p, kind)
    factors = []
    for q, m in result.factors:
        q_gamma = automorphism_group(q)
        factors.append(
            FactorOrbits(
                factor=q,
                multiplicity=m,
                orbits=len(permgroup.orbits(q_gamma)),
                steps=kind.steps(q.rank),
                group_order=q_gamma.order,
            )
        )
    return OrbitReport(
        kind=kind,
        flag_count=len(p.flags),
        group_order=gamma.order,
        orbit_sizes=sizes,
        predicted=predicted_orbits(factors),
        predicted_group_order=predicted_group_order(factors),
        factors=factors,
    )
