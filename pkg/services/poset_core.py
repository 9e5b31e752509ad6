"""
poset_core.py — ranked face posets, the abstract-polytope axioms, isomorphism,
duality, sections and end-face stripping.

A FacePoset stores faces as dense integer ids with a rank each, plus the cover
(Hasse) relation.  The order itself is the transitive closure of the covers and
is only materialised on demand, as per-face bitsets (Python ints) that are
cached on the value.

Concurrency notes
-----------------
FacePoset and Polytope are frozen dataclasses.  Derived data (cover lists,
bitsets, flags, adjacency tables) is memoised with functools.cached_property;
each cached value is a pure function of the frozen fields, so two threads
racing on the same attribute compute identical results and the last write wins.
"""

from __future__ import annotations

import enum
import logging
from collections import Counter
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Iterator

import networkx as nx
from networkx.algorithms import isomorphism as nx_iso

log = logging.getLogger(__name__)


class DanglingId(LookupError):
    pass


class NonHasseCover(ValueError):
    pass


class CyclicCovers(ValueError):
    pass


class NotComparable(ValueError):
    pass


class AlreadyBounded(ValueError):
    pass


class RankOutOfRange(ValueError):
    pass


class NotAPolytope(ValueError):
    def __init__(self, report: ValidationReport):
        self.report = report
        super().__init__("not an abstract polytope: " + "; ".join(str(v) for v in report.violations))


class Ends(enum.Enum):
    NONE = "none"
    MIN = "min"
    MAX = "max"
    BOTH = "both"

    @property
    def has_min(self) -> bool:
        return self in (Ends.MIN, Ends.BOTH)

    @property
    def has_max(self) -> bool:
        return self in (Ends.MAX, Ends.BOTH)


def iter_bits(mask: int) -> Iterator[int]:
    """Yield the set bit positions of mask in increasing order."""
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


# ---------------------------------------------------------------------------
# Face posets
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Face:
    id: int
    rank: int


@dataclass(frozen=True)
class FacePoset:
    """Faces 0..len(ranks)-1; covers are sorted (upper, lower) pairs."""

    ranks: tuple[int, ...]
    covers: tuple[tuple[int, int], ...] = field(default=())

    def __len__(self) -> int:
        return len(self.ranks)

    @property
    def faces(self) -> list[Face]:
        return [Face(i, r) for i, r in enumerate(self.ranks)]

    @property
    def rank_span(self) -> tuple[int, int] | None:
        if not self.ranks:
            return None
        return min(self.ranks), max(self.ranks)

    @cached_property
    def upper_covers(self) -> tuple[tuple[int, ...], ...]:
        ups: list[list[int]] = [[] for _ in self.ranks]
        for upper, lower in self.covers:
            ups[lower].append(upper)
        return tuple(tuple(sorted(u)) for u in ups)

    @cached_property
    def lower_covers(self) -> tuple[tuple[int, ...], ...]:
        downs: list[list[int]] = [[] for _ in self.ranks]
        for upper, lower in self.covers:
            downs[upper].append(lower)
        return tuple(tuple(sorted(d)) for d in downs)

    @cached_property
    def by_rank(self) -> tuple[int, ...]:
        """Face ids sorted by (rank, id)."""
        return tuple(sorted(range(len(self.ranks)), key=lambda i: (self.ranks[i], i)))

    @cached_property
    def down_masks(self) -> tuple[int, ...]:
        """down_masks[x] has bit y set iff y <= x."""
        masks = [0] * len(self.ranks)
        for x in self.by_rank:
            m = 1 << x
            for lower in self.lower_covers[x]:
                m |= masks[lower]
            masks[x] = m
        return tuple(masks)

    @cached_property
    def up_masks(self) -> tuple[int, ...]:
        """up_masks[x] has bit y set iff y >= x."""
        masks = [0] * len(self.ranks)
        for x in reversed(self.by_rank):
            m = 1 << x
            for upper in self.upper_covers[x]:
                m |= masks[upper]
            masks[x] = m
        return tuple(masks)

    @cached_property
    def neighbour_masks(self) -> tuple[int, ...]:
        masks = []
        for x in range(len(self.ranks)):
            m = 0
            for y in self.upper_covers[x] + self.lower_covers[x]:
                m |= 1 << y
            masks.append(m)
        return tuple(masks)

    def leq(self, a: int, b: int) -> bool:
        return bool(self.down_masks[b] >> a & 1)

    def faces_of_rank(self, rank: int) -> list[int]:
        return [i for i, r in enumerate(self.ranks) if r == rank]

    def mask_of(self, ids: Iterable[int]) -> int:
        m = 0
        for i in ids:
            m |= 1 << i
        return m

    @property
    def minimal_faces(self) -> list[int]:
        return [i for i, d in enumerate(self.lower_covers) if not d]

    @property
    def maximal_faces(self) -> list[int]:
        return [i for i, u in enumerate(self.upper_covers) if not u]

    def induced(self, ids: Iterable[int]) -> tuple[FacePoset, dict[int, int]]:
        """
        Subposet on ids (ranks kept) with the covers of self between kept faces.
        Only meaningful for convex subsets (intervals, fibres, up-sets).
        Returns (poset, old_id -> new_id).
        """
        keep = sorted(set(ids))
        index = {old: new for new, old in enumerate(keep)}
        covers = sorted(
            (index[u], index[l]) for u, l in self.covers if u in index and l in index
        )
        return FacePoset(tuple(self.ranks[i] for i in keep), tuple(covers)), index

    def reversed(self) -> FacePoset:
        """Order dual with ranks negated (no renormalisation)."""
        return FacePoset(
            tuple(-r for r in self.ranks),
            tuple(sorted((l, u) for u, l in self.covers)),
        )

    def shifted(self, delta: int) -> FacePoset:
        return FacePoset(tuple(r + delta for r in self.ranks), self.covers)

    @cached_property
    def digraph(self) -> nx.DiGraph:
        """Hasse diagram, edges upper -> lower, nodes labelled by rank and degrees."""
        g = nx.DiGraph()
        for i, r in enumerate(self.ranks):
            g.add_node(i, label=f"{r}:{len(self.upper_covers[i])}:{len(self.lower_covers[i])}")
        g.add_edges_from(self.covers)
        return g

    @cached_property
    def wl_hash(self) -> str:
        return nx.weisfeiler_lehman_graph_hash(self.digraph, node_attr="label")


def build_poset(face_ranks: list[int], covers: Iterable[tuple[int, int]]) -> FacePoset:
    """
    Build a FacePoset from a rank list and (upper, lower) cover pairs.
    Duplicate covers are dropped.
    Raises DanglingId, CyclicCovers or NonHasseCover.
    """
    count = len(face_ranks)
    pairs = sorted({(int(u), int(l)) for u, l in covers})
    for u, l in pairs:
        if not (0 <= u < count and 0 <= l < count):
            raise DanglingId(f"cover ({u}, {l}) references a face id outside 0..{count - 1}")

    g = nx.DiGraph()
    g.add_nodes_from(range(count))
    g.add_edges_from(pairs)
    if not nx.is_directed_acyclic_graph(g):
        cycle = nx.find_cycle(g)
        raise CyclicCovers(f"covers contain a cycle through faces {[e[0] for e in cycle]}")

    for u, l in pairs:
        if face_ranks[u] != face_ranks[l] + 1:
            raise NonHasseCover(
                f"cover ({u}, {l}) joins ranks {face_ranks[u]} and {face_ranks[l]}"
            )
    return FacePoset(tuple(int(r) for r in face_ranks), tuple(pairs))


def is_connected(poset: FacePoset) -> bool:
    """Comparability connectivity (weakly connected Hasse diagram)."""
    if len(poset) == 0:
        return False
    return nx.is_weakly_connected(poset.digraph)


def mask_connected(poset: FacePoset, mask: int) -> bool:
    """True iff the faces in mask are connected through covers that stay inside mask."""
    if not mask:
        return True
    start = mask & -mask
    seen = start
    frontier = start
    nbrs = poset.neighbour_masks
    while frontier:
        grow = 0
        for x in iter_bits(frontier):
            grow |= nbrs[x]
        frontier = grow & mask & ~seen
        seen |= frontier
    return seen == mask


# ---------------------------------------------------------------------------
# Validation
# ---------------------------------------------------------------------------

class ViolationKind(enum.Enum):
    NO_MINIMUM = "NoMinimum"
    NO_MAXIMUM = "NoMaximum"
    CHAIN_LENGTH_MISMATCH = "ChainLengthMismatch"
    DIAMOND_VIOLATION = "DiamondViolation"
    SECTION_DISCONNECTED = "SectionDisconnected"
    RANK_GAP = "RankGap"


@dataclass(frozen=True)
class Violation:
    kind: ViolationKind
    faces: tuple[int, ...] = ()

    def __str__(self) -> str:
        if not self.faces:
            return self.kind.value
        return f"{self.kind.value}{self.faces}"


@dataclass
class ValidationReport:
    violations: list[Violation] = field(default_factory=list)

    @property
    def is_polytope(self) -> bool:
        return not self.violations

    def add(self, kind: ViolationKind, *faces: int) -> None:
        self.violations.append(Violation(kind, tuple(faces)))


def validate_polytope(poset: FacePoset) -> ValidationReport:
    """Check every abstract-polytope axiom; each failure becomes a report entry."""
    report = ValidationReport()
    if len(poset) == 0:
        report.add(ViolationKind.NO_MINIMUM)
        report.add(ViolationKind.NO_MAXIMUM)
        return report

    minimal = poset.minimal_faces
    maximal = poset.maximal_faces
    if len(minimal) != 1:
        report.add(ViolationKind.NO_MINIMUM, *minimal)
    if len(maximal) != 1:
        report.add(ViolationKind.NO_MAXIMUM, *maximal)

    low, high = poset.rank_span
    present = set(poset.ranks)
    # The lone rank -1 face is the empty polytope; it has no rank-0 face.
    if low != -1 or high < 0 or any(r not in present for r in range(low, high + 1)):
        report.add(ViolationKind.RANK_GAP)

    # Every maximal chain runs from a minimal to a maximal face through every rank.
    expected = high - low + 1
    for f in minimal:
        for g in maximal:
            if poset.leq(f, g) and poset.ranks[g] - poset.ranks[f] + 1 != expected:
                report.add(ViolationKind.CHAIN_LENGTH_MISMATCH, f, g)

    up = poset.upper_covers
    for f in range(len(poset)):
        between: Counter[int] = Counter()
        for h in up[f]:
            for g in up[h]:
                between[g] += 1
        for g, count in sorted(between.items()):
            if count != 2:
                report.add(ViolationKind.DIAMOND_VIOLATION, f, g)

    up_masks = poset.up_masks
    down_masks = poset.down_masks
    for f in range(len(poset)):
        above = up_masks[f] & ~(1 << f)
        for g in iter_bits(above):
            if poset.ranks[g] - poset.ranks[f] < 3:
                continue
            interval = above & down_masks[g] & ~(1 << g)
            if not mask_connected(poset, interval):
                report.add(ViolationKind.SECTION_DISCONNECTED, f, g)

    if report.violations:
        log.debug("validation found %d violation(s)", len(report.violations))
    return report


# ---------------------------------------------------------------------------
# Polytopes
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Polytope:
    """
    A validated abstract polytope.  Construct through make_polytope() unless the
    poset is a polytope by construction (products, sections, duals).
    Flags are tuples of face ids indexed by rank + 1.
    """

    poset: FacePoset
    rank: int

    @cached_property
    def minimum(self) -> int:
        return self.poset.minimal_faces[0]

    @cached_property
    def maximum(self) -> int:
        return self.poset.maximal_faces[0]

    @property
    def face_count(self) -> int:
        return len(self.poset)

    def faces_of_rank(self, rank: int) -> list[int]:
        return self.poset.faces_of_rank(rank)

    @property
    def f_vector(self) -> tuple[int, ...]:
        counts = Counter(self.poset.ranks)
        return tuple(counts[r] for r in range(self.rank))

    @property
    def is_empty(self) -> bool:
        return self.rank == -1

    @cached_property
    def flags(self) -> tuple[tuple[int, ...], ...]:
        """All flags, lexicographic by face ids."""
        up = self.poset.upper_covers
        ranks = self.poset.ranks
        flags: list[tuple[int, ...]] = []
        stack: list[tuple[int, ...]] = [(self.minimum,)]
        while stack:
            chain = stack.pop()
            last = chain[-1]
            if ranks[last] == self.rank:
                flags.append(chain)
                continue
            for upper in reversed(up[last]):
                stack.append(chain + (upper,))
        return tuple(flags)

    @cached_property
    def flag_index(self) -> dict[tuple[int, ...], int]:
        return {flag: i for i, flag in enumerate(self.flags)}

    def adjacent_flag(self, flag: tuple[int, ...], i: int) -> tuple[int, ...]:
        """The unique flag differing from flag only in its rank-i face."""
        if not 0 <= i < self.rank:
            raise RankOutOfRange(f"rank {i} is outside 0..{self.rank - 1}")
        below, current, above = flag[i], flag[i + 1], flag[i + 2]
        candidates = set(self.poset.upper_covers[below]) & set(self.poset.lower_covers[above])
        candidates.discard(current)
        (other,) = candidates
        return flag[: i + 1] + (other,) + flag[i + 2:]

    @cached_property
    def adjacency(self) -> tuple[tuple[int, ...], ...]:
        """adjacency[i][k] is the index of the i-adjacent flag of flag k."""
        index = self.flag_index
        return tuple(
            tuple(index[self.adjacent_flag(flag, i)] for flag in self.flags)
            for i in range(self.rank)
        )


EMPTY = Polytope(FacePoset((-1,), ()), -1)


def make_polytope(poset: FacePoset) -> Polytope:
    """Validate poset and wrap it; raises NotAPolytope with the full report."""
    report = validate_polytope(poset)
    if not report.is_polytope:
        raise NotAPolytope(report)
    return Polytope(poset, max(poset.ranks))


def is_isomorphic(a: FacePoset, b: FacePoset) -> dict[int, int] | None:
    """
    A rank- and cover-preserving bijection a -> b, or None.
    Cheap invariants reject first; VF2 on the labelled Hasse diagrams decides.
    """
    if len(a) != len(b) or len(a.covers) != len(b.covers):
        return None
    if sorted(a.ranks) != sorted(b.ranks):
        return None
    if a.wl_hash != b.wl_hash:
        return None
    matcher = nx_iso.DiGraphMatcher(
        a.digraph, b.digraph, node_match=nx_iso.categorical_node_match("label", None)
    )
    if not matcher.is_isomorphic():
        return None
    return dict(sorted(matcher.mapping.items()))


def dual(p: Polytope) -> Polytope:
    ranks = tuple(p.rank - 1 - r for r in p.poset.ranks)
    covers = tuple(sorted((l, u) for u, l in p.poset.covers))
    return Polytope(FacePoset(ranks, covers), p.rank)


def section(p: Polytope, f: int, g: int) -> Polytope:
    """The closed interval g/f, re-ranked so f has rank -1."""
    if not p.poset.leq(f, g):
        raise NotComparable(f"face {f} is not below face {g}")
    mask = p.poset.up_masks[f] & p.poset.down_masks[g]
    sub, _ = p.poset.induced(iter_bits(mask))
    shift = -1 - p.poset.ranks[f]
    return Polytope(sub.shifted(shift), p.poset.ranks[g] - p.poset.ranks[f] - 1)


def vertex_figure(p: Polytope, vertex: int) -> Polytope:
    return section(p, vertex, p.maximum)


def facet(p: Polytope, face: int) -> Polytope:
    return section(p, p.minimum, face)


def strip(p: Polytope, ends: Ends) -> FacePoset:
    """Drop the minimum and/or maximum face."""
    drop = set()
    if ends.has_min:
        drop.add(p.minimum)
    if ends.has_max:
        drop.add(p.maximum)
    if not drop:
        return p.poset
    sub, _ = p.poset.induced(i for i in range(len(p.poset)) if i not in drop)
    return sub


def cap(poset: FacePoset, ends: Ends) -> FacePoset:
    """
    Add a new minimum at rank -1 below every minimal face and/or a new maximum
    one rank above the top, covering every maximal face.  New faces get the
    next free ids (minimum first).
    """
    if ends is Ends.NONE:
        return poset
    ranks = list(poset.ranks)
    covers = list(poset.covers)
    minimal = poset.minimal_faces
    maximal = poset.maximal_faces
    if ends.has_min:
        if -1 in poset.ranks:
            raise AlreadyBounded("poset already has a face of rank -1")
        bottom = len(ranks)
        ranks.append(-1)
        covers.extend((m, bottom) for m in minimal)
    if ends.has_max:
        if len(poset) > 1 and len(maximal) == 1:
            raise AlreadyBounded(f"poset already has a maximum face {maximal[0]}")
        top_rank = max(poset.ranks) + 1 if poset.ranks else 0
        top = len(ranks)
        ranks.append(top_rank)
        if poset.ranks:
            covers.extend((top, m) for m in maximal)
        else:
            covers.extend((top, i) for i, r in enumerate(ranks) if r == -1)
    return FacePoset(tuple(ranks), tuple(sorted(covers)))
