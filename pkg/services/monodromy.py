"""
monodromy.py — monodromy groups of polytopes, their embedding into the wreath
product of the factors' monodromy groups with S_n, and the structure reports
for pyramids, prisms and topological products of polygons.

Generators act on flag indices in the order of Polytope.flags, and products are
taken left to right (x * y applies x first), so Φ(xy) = (Φx)y.

The embedding writes each generator s_k as (labels, α).  With the product flag's
stepped chain C_0 < ... < C_n and its adjacency sequence a, changing the face of
rank k changes C_t, t = k - rank(C_0):
  - 0 < t < n, a[t-1] != a[t]: only the sequence changes (positions t-1, t swap);
  - 0 < t < n, a[t-1] == a[t] == j: factor j's flag moves along its own r_l,
    where l is the rank of C_t[j] in that factor;
  - t == 0 or t == n: an end face of the chain moves inside factor a[0] or a[n-1].
Interior generators carry α = (t-1, t); the end generators lie in the kernel.
"""

from __future__ import annotations

import enum
import logging
import math
from dataclasses import dataclass, field
from functools import cached_property, reduce
from typing import Sequence

from sympy.combinatorics import Permutation

from config import COMPLEMENT_MAX_ELEMENTS, COMPLEMENT_MAX_TARGET, TOPO_POLYGONS_MAX_FLAGS
from services import catalog, permgroup
from services.factorization import FactorizationResult
from services.permgroup import PermGroup, SearchBudgetExceeded
from services.poset_core import Polytope, dual
from services.products import ProductKind, ProductStructure, product_structure
from services.symmetry import AdjacencySequence, Flag, adjacency_sequences, flag_compose, flag_decompose

log = logging.getLogger(__name__)


class EmbeddingMismatch(RuntimeError):
    pass


# ---------------------------------------------------------------------------
# Monodromy groups
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class MonodromyGens:
    """r_0..r_{n-1} as permutations of the flag indices of polytope."""

    polytope: Polytope
    generators: tuple[Permutation, ...]

    @property
    def degree(self) -> int:
        return len(self.polytope.flags)

    @cached_property
    def group(self) -> PermGroup:
        return PermGroup(self.degree, self.generators)

    @property
    def order(self) -> int:
        return self.group.order


def monodromy_group(p: Polytope) -> MonodromyGens:
    return MonodromyGens(p, tuple(Permutation(list(row)) for row in p.adjacency))


def dual_generators(p: Polytope) -> tuple[Permutation, ...]:
    """
    The generators of M(dual(p)) carried over to the flag indices of p.  They
    are the generators of M(p) in reverse order.
    """
    d = dual(p)
    to_p = [p.flag_index[tuple(reversed(flag))] for flag in d.flags]
    gens = []
    for row in d.adjacency:
        images = [0] * len(p.flags)
        for k, target in enumerate(row):
            images[to_p[k]] = to_p[target]
        gens.append(Permutation(images))
    return tuple(gens)


# ---------------------------------------------------------------------------
# Wreath embedding
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class WreathElement:
    """
    labels maps each adjacency sequence (by its entries) to one word per factor,
    a word being the indices of that factor's monodromy generators to apply in
    order.  alpha permutes the n sequence positions.
    """

    labels: dict[tuple[int, ...], tuple[tuple[int, ...], ...]]
    alpha: Permutation

    def act(self, structure: ProductStructure, flag: Flag) -> Flag:
        factor_flags, seq = flag_decompose(structure, flag)
        words = self.labels[seq.entries]
        moved = []
        for q, ff, word in zip(structure.expanded, factor_flags, words):
            for l in word:
                ff = q.adjacent_flag(ff, l)
            moved.append(ff)
        entries = [0] * len(seq.entries)
        for t, a in enumerate(seq.entries):
            entries[self.alpha(t)] = a
        return flag_compose(structure, moved, AdjacencySequence(tuple(entries), seq.counts))


def _as_structure(factorization: ProductStructure | FactorizationResult) -> ProductStructure:
    if isinstance(factorization, FactorizationResult):
        return factorization.structure
    return factorization


def _generator(structure: ProductStructure, k: int, sequences: list[AdjacencySequence]) -> WreathElement:
    ends = structure.kind.stripped_ends
    lead = 0 if ends.has_min else -1
    n = sum(structure.steps)
    r = len(structure.expanded)
    t = k - lead

    labels = {}
    for seq in sequences:
        a = seq.entries
        words: list[tuple[int, ...]] = [()] * r
        if t == 0:
            words[a[0]] = (lead,)
        elif t == n:
            j = a[n - 1]
            words[j] = (lead + structure.steps[j],)
        elif a[t - 1] == a[t]:
            j = a[t]
            words[j] = (lead + a[:t].count(j),)
        labels[a] = tuple(words)

    if 0 < t < n:
        alpha = permgroup.cycles(n, (t - 1, t))
    else:
        alpha = permgroup.identity(n)
    return WreathElement(labels, alpha)


def wreath_embed(
    p: Polytope, factorization: ProductStructure | FactorizationResult
) -> list[WreathElement]:
    """
    The images w_0..w_{rank-1} of the monodromy generators, each checked
    against every flag: Φ w_k must equal the k-adjacent flag of Φ.
    """
    structure = _as_structure(factorization)
    if structure.polytope.poset != p.poset:
        raise ValueError("factorization does not belong to this polytope")
    sequences = adjacency_sequences(structure)
    flags = p.flags
    elements = []
    for k in range(p.rank):
        w = _generator(structure, k, sequences)
        for i, flag in enumerate(flags):
            image = w.act(structure, flag)
            expected = flags[p.adjacency[k][i]]
            if image != expected:
                raise EmbeddingMismatch(f"w_{k} sends flag {flag} to {image}, expected {expected}")
        elements.append(w)
    log.debug("wreath embedding verified on %d flag(s), %d generator(s)", len(flags), p.rank)
    return elements


# ---------------------------------------------------------------------------
# Extension reports
# ---------------------------------------------------------------------------

class Verdict(enum.Enum):
    SPLIT = "Split"
    NON_SPLIT = "NonSplit"
    UNKNOWN = "Unknown"


@dataclass(frozen=True)
class SplitVerdict:
    verdict: Verdict
    witness: PermGroup | None = None
    reason: str = ""

    def __str__(self) -> str:
        return f"{self.verdict.value} ({self.reason})" if self.reason else self.verdict.value


def split_verdict(
    g: PermGroup, k: PermGroup, target_order: int, max_elements: int = COMPLEMENT_MAX_ELEMENTS
) -> SplitVerdict:
    """Whether g splits over its normal subgroup k, by exhaustive complement search."""
    if target_order > COMPLEMENT_MAX_TARGET:
        return SplitVerdict(Verdict.UNKNOWN, reason=f"quotient order {target_order} too large to search")
    try:
        witness = permgroup.find_complement(g, k, target_order, max_elements=max_elements)
    except SearchBudgetExceeded as e:
        log.warning("complement search gave up: %s", e)
        return SplitVerdict(Verdict.UNKNOWN, reason=str(e))
    if witness is None:
        return SplitVerdict(Verdict.NON_SPLIT, reason="exhaustive")
    return SplitVerdict(Verdict.SPLIT, witness=witness)


@dataclass
class ExtensionReport:
    monodromy: MonodromyGens
    n: int
    image_order: int
    kernel: PermGroup
    subgroups: dict[str, int] = field(default_factory=dict)
    checks: dict[str, bool] = field(default_factory=dict)
    split: SplitVerdict | None = None
    inner_split: SplitVerdict | None = None

    @property
    def monodromy_order(self) -> int:
        return self.monodromy.order

    @property
    def kernel_order(self) -> int:
        return self.kernel.order

    @property
    def consistent(self) -> bool:
        return self.monodromy_order == self.kernel_order * math.factorial(self.n) and all(self.checks.values())


def projection_report(
    p: Polytope,
    factorization: ProductStructure | FactorizationResult,
    split: bool = True,
) -> ExtensionReport:
    """
    |M|, the image of M under the projection onto S_n, and the kernel K.  With
    split set, also decides whether M splits over K.
    """
    structure = _as_structure(factorization)
    elements = wreath_embed(p, structure)
    mono = monodromy_group(p)
    n = sum(structure.steps)

    image = PermGroup(n, tuple(w.alpha for w in elements))
    if image.order != math.factorial(n):
        raise EmbeddingMismatch(f"projection image has order {image.order}, expected {math.factorial(n)}")
    kernel = permgroup.kernel_of_action(mono.group, [list(w.alpha.array_form) for w in elements])

    report = ExtensionReport(monodromy=mono, n=n, image_order=image.order, kernel=kernel)
    report.subgroups["K"] = kernel.order
    if split:
        report.split = split_verdict(mono.group, kernel, math.factorial(n))
    log.debug("|M| = %d, n = %d, |K| = %d", mono.order, n, kernel.order)
    return report


def _product(perms: Sequence[Permutation], degree: int) -> Permutation:
    return reduce(lambda x, y: x * y, perms, permgroup.identity(degree))


def prism_structure(p: int) -> ExtensionReport:
    """
    M(pri(gon(p))) = K ⋊ S_3.  With b = (s0 s1)^2, c = s2 b s2 and d = s1 c s1,
    H = <b^2, c^2, d^2> is (C_m)^3 with m = p / gcd(p, 4), normal in K = <s0, b, c>
    with K/H elementary abelian of order 8.  split is M over K, inner_split is K
    over H.
    """
    if p < 3:
        raise catalog.ParameterOutOfRange(f"prism needs a polygon with p >= 3, got {p}")
    structure = product_structure(ProductKind.CARTESIAN, [catalog.edge(), catalog.gon(p)])
    report = projection_report(structure.polytope, structure)
    s0, s1, s2 = report.monodromy.generators
    degree = report.monodromy.degree
    m = p // math.gcd(p, 4)

    b = (s0 * s1) ** 2
    c = s2 * b * s2
    d = s1 * c * s1
    h = PermGroup(degree, (b ** 2, c ** 2, d ** 2))
    k = report.kernel
    k_named = PermGroup(degree, (s0, b, c))

    report.subgroups.update({"H": h.order, "K/H": k.order // h.order})
    report.checks["|M| = 48 m^3"] = report.monodromy_order == 48 * m ** 3
    report.checks["order(s0 s1) = 4m"] = permgroup.element_order(s0 * s1) == 4 * m
    report.checks["|H| = m^3"] = h.order == m ** 3
    report.checks["H abelian"] = permgroup.is_abelian(h)
    report.checks["H generators of order m"] = all(permgroup.element_order(x) == m for x in h.generators)
    report.checks["H normal in K"] = permgroup.is_normal(k, h)
    report.checks["|K/H| = 8"] = k.order == 8 * h.order
    report.checks["K = <s0, b, c>"] = (
        k_named.order == k.order and all(permgroup.contains(k, x) for x in k_named.generators)
    )
    report.checks["K/H elementary abelian"] = all(
        permgroup.contains(h, permgroup.perm(x) ** 2)
        for x in permgroup.enumerate_elements(k_named)
    )
    report.inner_split = split_verdict(k_named, h, 8)
    return report


def _factor_rotation_orders(q: Polytope) -> list[int]:
    gens = monodromy_group(q).generators
    return [permgroup.element_order(x * y) for x, y in zip(gens, gens[1:])]


def pyramid_structure(p: int) -> ExtensionReport:
    """
    M(pyr(gon(p))) is an extension of S_4 by K = (C_m)^4, m = p / gcd(3, p).
    order(s_i s_{i+1}) = lcm(3, p_{i-1}, p_i) where p_j = order(r_j r_{j+1}) in
    M(gon(p)) and p_j = 1 outside the polygon's range.
    """
    if p < 3:
        raise catalog.ParameterOutOfRange(f"pyramid needs a polygon with p >= 3, got {p}")
    base = catalog.gon(p)
    structure = product_structure(ProductKind.JOIN, [catalog.point(), base])
    report = projection_report(structure.polytope, structure)
    gens = report.monodromy.generators
    m = p // math.gcd(3, p)
    rotations = _factor_rotation_orders(base)

    def base_rotation(j: int) -> int:
        return rotations[j] if 0 <= j < len(rotations) else 1

    report.checks["|M| = 24 m^4"] = report.monodromy_order == 24 * m ** 4
    report.checks["|K| = m^4"] = report.kernel_order == m ** 4
    report.checks["K abelian"] = permgroup.is_abelian(report.kernel)
    for i in range(len(gens) - 1):
        expected = math.lcm(3, base_rotation(i - 1), base_rotation(i))
        report.checks[f"order(s{i} s{i + 1}) = {expected}"] = (
            permgroup.element_order(gens[i] * gens[i + 1]) == expected
        )
    return report


def topo_polygons_structure(ps: Sequence[int]) -> ExtensionReport:
    """
    M(gon(p_1) topo ... topo gon(p_r)) = (D_L)^r ⋊ S_r with L = lcm(p_i).  The
    i-th dihedral factor acts on whichever polygon sits at sequence position i:
    it is generated by s_0 and s_r conjugated so that position i is moved to
    the front and to the back respectively.
    """
    ps = list(ps)
    r = len(ps)
    if r < 2:
        raise ValueError("topological product of polygons needs at least two polygons")
    for q in ps:
        if q < 2:
            raise catalog.ParameterOutOfRange(f"polygon parameter {q} must be >= 2")
    flags = math.prod(2 * q for q in ps) * math.factorial(r)
    if flags > TOPO_POLYGONS_MAX_FLAGS:
        raise ValueError(f"{flags} flags exceeds the limit of {TOPO_POLYGONS_MAX_FLAGS}")

    structure = product_structure(ProductKind.TOPOLOGICAL, [catalog.gon(q) for q in ps])
    report = projection_report(structure.polytope, structure)
    gens = report.monodromy.generators
    degree = report.monodromy.degree
    lcm = math.lcm(*ps)

    dihedral = []
    for i in range(r):
        front = _product([gens[j] for j in range(i, 0, -1)], degree)
        back = _product([gens[j] for j in range(i + 1, r)], degree)
        dihedral.append(PermGroup(degree, (front * gens[0] * ~front, back * gens[r] * ~back)))

    report.subgroups.update({f"D{i}": d.order for i, d in enumerate(dihedral)})
    report.checks["|M| = (2L)^r r!"] = report.monodromy_order == (2 * lcm) ** r * math.factorial(r)
    report.checks["dihedral factors of order 2L"] = all(d.order == 2 * lcm for d in dihedral)
    report.checks["dihedral factors commute"] = all(
        x * y == y * x
        for a in range(r)
        for b in range(a + 1, r)
        for x in dihedral[a].generators
        for y in dihedral[b].generators
    )
    joined = PermGroup(degree, tuple(x for d in dihedral for x in d.generators))
    report.checks["K generated by dihedral factors"] = (
        joined.order == report.kernel_order
        and all(permgroup.contains(report.kernel, x) for x in joined.generators)
    )
    return report


def prism_over(q: Polytope) -> ProductStructure:
    """edge × q with its coordinatization, for projection_report on general prisms."""
    return product_structure(ProductKind.CARTESIAN, [catalog.edge(), q])

