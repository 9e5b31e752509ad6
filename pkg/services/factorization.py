"""
factorization.py — unique prime factorization under each of the four products.

Every product is a cardinal product once the right end faces are stripped
(join: none, cartesian: minimum, direct sum: maximum, topological: both), so the
work happens on posets:

  * bounded below: each atom (cover of the minimum) lies in exactly one factor.
    An atom bipartition (A, B) proposes the factors
        left  = {x : every atom below x is in A}
        right = {x : every atom below x is in B}
    and is accepted iff the cover relation is exactly the product's.
    Atoms that cannot sit in different factors are merged beforehand: two atoms
    from different factors always have exactly one common upper cover at height
    two, and it covers nothing else.
  * bounded above only: the same on the order dual.
  * unbounded: factor the up-set of a minimal element m, seed an edge colouring
    at m from a grouping of its prime factors, and propagate the colouring over
    the whole Hasse diagram through the squares of the product.

Every candidate is checked against the full cover relation before it is used,
and factor() finally rebuilds the product and compares it face by face, so a
heuristic miss can only surface as RebuildMismatch.
"""

from __future__ import annotations

import itertools
import logging
from collections import deque
from dataclasses import dataclass
from typing import Callable, NamedTuple

import networkx as nx

from config import ORACLE_MAX_ATOMS
from services.poset_core import (
    FacePoset,
    Polytope,
    cap,
    is_connected,
    is_isomorphic,
    iter_bits,
)
from services.products import ProductKind, ProductStructure, product_structure

log = logging.getLogger(__name__)


class Disconnected(ValueError):
    pass


class RebuildMismatch(RuntimeError):
    pass


class TooLargeForOracle(ValueError):
    pass


@dataclass(frozen=True)
class CardinalFactorization:
    """coordinates[x] holds one face id per factor, in factor order."""

    factors: tuple[FacePoset, ...]
    coordinates: tuple[tuple[int, ...], ...]


class _Split(NamedTuple):
    left: FacePoset
    right: FacePoset
    pairs: tuple[tuple[int, int], ...]


Splitter = Callable[[FacePoset], "_Split | None"]


# ---------------------------------------------------------------------------
# Split verification
# ---------------------------------------------------------------------------

def _verify_split(
    poset: FacePoset,
    left_ids: list[int],
    right_ids: list[int],
    pairs: list[tuple[int, int]],
) -> _Split | None:
    """Accept iff x -> pairs[x] is a bijection onto left x right that carries covers exactly."""
    left, lidx = poset.induced(left_ids)
    right, ridx = poset.induced(right_ids)
    if len(left) < 2 or len(right) < 2:
        return None
    local = [(lidx[a], ridx[b]) for a, b in pairs]
    if len(local) != len(left) * len(right) or len(set(local)) != len(local):
        return None

    left_covers = set(left.covers)
    right_covers = set(right.covers)
    if len(poset.covers) != len(left_covers) * len(right) + len(right_covers) * len(left):
        return None
    for u, l in poset.covers:
        (ua, ub), (la, lb) = local[u], local[l]
        if ua == la:
            if (ub, lb) not in right_covers:
                return None
        elif ub == lb:
            if (ua, la) not in left_covers:
                return None
        else:
            return None
    return _Split(left, right, tuple(local))


def _top_of(poset: FacePoset, mask: int) -> int | None:
    """The unique maximum of the faces in mask, if there is one."""
    down = poset.down_masks
    for c in iter_bits(mask):
        if mask & ~down[c] == 0:
            return c
    return None


def _bipartitions(count: int):
    """Proper subsets of range(count) containing 0, smallest masks first."""
    full = (1 << count) - 1
    for m in range(1 << (count - 1)):
        chosen = (m << 1) | 1
        if chosen != full:
            yield [i for i in range(count) if chosen >> i & 1]


# ---------------------------------------------------------------------------
# Bounded below: atom bipartitions
# ---------------------------------------------------------------------------

def _try_atom_split(poset: FacePoset, a_mask: int, b_mask: int) -> _Split | None:
    down = poset.down_masks
    n = len(poset)
    left_ids = [x for x in range(n) if down[x] & b_mask == 0]
    right_ids = [x for x in range(n) if down[x] & a_mask == 0]
    if len(left_ids) * len(right_ids) != n:
        return None
    left_mask = poset.mask_of(left_ids)
    right_mask = poset.mask_of(right_ids)
    pairs = []
    for x in range(n):
        a = _top_of(poset, down[x] & left_mask)
        b = _top_of(poset, down[x] & right_mask)
        if a is None or b is None:
            return None
        pairs.append((a, b))
    return _verify_split(poset, left_ids, right_ids, pairs)


def _atom_groups(poset: FacePoset, bottom: int, atoms: tuple[int, ...]) -> list[list[int]]:
    """Atoms that must share a factor, merged into groups (sorted by smallest atom)."""
    down = poset.down_masks
    atom_mask = poset.mask_of(atoms)
    height2 = poset.ranks[bottom] + 2
    forced = nx.Graph()
    forced.add_nodes_from(atoms)

    common: dict[tuple[int, int], list[int]] = {}
    for h in poset.faces_of_rank(height2):
        below = list(iter_bits(down[h] & atom_mask))
        if len(below) != 2:
            forced.add_edges_from(zip(below, below[1:]))
        for pair in itertools.combinations(below, 2):
            common.setdefault(pair, []).append(h)

    for pair in itertools.combinations(atoms, 2):
        hs = common.get(pair, [])
        if len(hs) != 1 or bin(down[hs[0]] & atom_mask).count("1") != 2:
            forced.add_edge(*pair)

    groups = [sorted(c) for c in nx.connected_components(forced)]
    return sorted(groups)


def _split_bounded(poset: FacePoset, exhaustive: bool) -> _Split | None:
    (bottom,) = poset.minimal_faces
    atoms = poset.upper_covers[bottom]
    if len(atoms) < 2:
        return None
    if exhaustive:
        if len(atoms) > ORACLE_MAX_ATOMS:
            raise TooLargeForOracle(
                f"{len(atoms)} atoms exceeds the oracle limit of {ORACLE_MAX_ATOMS}"
            )
        groups = [[a] for a in atoms]
    else:
        groups = _atom_groups(poset, bottom, atoms)
    log.debug("bounded split: %d atoms in %d group(s)", len(atoms), len(groups))
    if len(groups) < 2:
        return None

    atom_mask = poset.mask_of(atoms)
    for chosen in _bipartitions(len(groups)):
        a_mask = poset.mask_of(a for i in chosen for a in groups[i])
        split = _try_atom_split(poset, a_mask, atom_mask & ~a_mask)
        if split is not None:
            return split
    return None


# ---------------------------------------------------------------------------
# Unbounded: colour propagation seeded at a minimal face
# ---------------------------------------------------------------------------

class _Colouring:
    """Two-colouring of Hasse edges, keyed by (upper, lower)."""

    def __init__(self, poset: FacePoset):
        self.poset = poset
        self.colour: dict[tuple[int, int], int] = {}

    def key(self, a: int, b: int) -> tuple[int, int]:
        return (a, b) if self.poset.ranks[a] > self.poset.ranks[b] else (b, a)

    def neighbours(self, x: int) -> tuple[int, ...]:
        return self.poset.upper_covers[x] + self.poset.lower_covers[x]

    def derive(self, y: int, x: int) -> dict[tuple[int, int], int] | None:
        """
        Colours of every edge at x, given the full colouring at y and the edge y-x.
        Edges at y of the other colour translate across a unique square to x;
        everything else at x keeps the colour of y-x.
        """
        ranks = self.poset.ranks
        nbr_masks = self.poset.neighbour_masks
        c = self.colour[self.key(y, x)]
        translated: dict[tuple[int, int], int] = {}
        moved = 0
        for z in self.neighbours(y):
            if z == x or self.colour[self.key(y, z)] == c:
                continue
            moved += 1
            target = ranks[x] + ranks[z] - ranks[y]
            squares = [
                w for w in self.neighbours(x)
                if w != y and ranks[w] == target and nbr_masks[w] >> z & 1
            ]
            if len(squares) != 1:
                return None
            translated[self.key(x, squares[0])] = 1 - c
        if len(translated) != moved:
            return None
        result = {self.key(x, w): c for w in self.neighbours(x)}
        result.update(translated)
        return result


def _propagate(poset: FacePoset, seed: int, seed_colours: dict[tuple[int, int], int]) -> _Split | None:
    colouring = _Colouring(poset)
    colouring.colour.update(seed_colours)
    complete = [False] * len(poset)
    complete[seed] = True
    queue = deque([seed])
    while queue:
        y = queue.popleft()
        for x in colouring.neighbours(y):
            derived = colouring.derive(y, x)
            if derived is None:
                return None
            for k, v in derived.items():
                old = colouring.colour.setdefault(k, v)
                if old != v:
                    return None
            if not complete[x]:
                complete[x] = True
                queue.append(x)
    if not all(complete):
        return None

    fibres = []
    for c in (0, 1):
        g = nx.Graph()
        g.add_nodes_from(range(len(poset)))
        g.add_edges_from(k for k, v in colouring.colour.items() if v == c)
        label = {}
        for i, comp in enumerate(nx.connected_components(g)):
            for x in comp:
                label[x] = i
        fibres.append(label)
    a_fibre, b_fibre = fibres

    left_ids = [x for x in range(len(poset)) if a_fibre[x] == a_fibre[seed]]
    right_ids = [x for x in range(len(poset)) if b_fibre[x] == b_fibre[seed]]
    left_by_b = {b_fibre[x]: x for x in left_ids}
    right_by_a = {a_fibre[x]: x for x in right_ids}
    if len(left_by_b) != len(left_ids) or len(right_by_a) != len(right_ids):
        return None
    pairs = []
    for x in range(len(poset)):
        a = left_by_b.get(b_fibre[x])
        b = right_by_a.get(a_fibre[x])
        if a is None or b is None:
            return None
        pairs.append((a, b))
    return _verify_split(poset, left_ids, right_ids, pairs)


def _split_unbounded(poset: FacePoset, splitter: Splitter) -> _Split | None:
    seed = poset.minimal_faces[0]
    star, sidx = poset.induced(iter_bits(poset.up_masks[seed]))
    inner = _factor(star, splitter)
    count = len(inner.factors)
    log.debug("unbounded split: up-set of face %d has %d prime factor(s)", seed, count)
    if count < 2:
        return None

    base = inner.coordinates[sidx[seed]]
    for chosen in _bipartitions(count):
        seed_colours = {}
        for x in poset.upper_covers[seed]:
            coords = inner.coordinates[sidx[x]]
            (moved,) = [i for i in range(count) if coords[i] != base[i]]
            seed_colours[(x, seed)] = 0 if moved in chosen else 1
        split = _propagate(poset, seed, seed_colours)
        if split is not None:
            return split
    return None


# ---------------------------------------------------------------------------
# Recursive driver
# ---------------------------------------------------------------------------

def _splitter(exhaustive: bool) -> Splitter:
    def split(poset: FacePoset) -> _Split | None:
        if len(poset.minimal_faces) == 1:
            return _split_bounded(poset, exhaustive)
        if len(poset.maximal_faces) == 1:
            found = _split_bounded(poset.reversed(), exhaustive)
            if found is None:
                return None
            return _Split(found.left.reversed(), found.right.reversed(), found.pairs)
        return _split_unbounded(poset, split)

    return split


def _factor(poset: FacePoset, splitter: Splitter) -> CardinalFactorization:
    if len(poset) == 1:
        return CardinalFactorization((), ((),))
    found = splitter(poset)
    if found is None:
        return CardinalFactorization((poset,), tuple((x,) for x in range(len(poset))))
    left = _factor(found.left, splitter)
    right = _factor(found.right, splitter)
    coords = tuple(left.coordinates[a] + right.coordinates[b] for a, b in found.pairs)
    return CardinalFactorization(left.factors + right.factors, coords)


def factor_cardinal(poset: FacePoset) -> CardinalFactorization:
    """Prime cardinal factors of a connected poset; a prime input comes back alone."""
    if not is_connected(poset):
        raise Disconnected("cardinal factorization needs a connected poset")
    return _factor(poset, _splitter(exhaustive=False))


def oracle_factor(poset: FacePoset) -> CardinalFactorization:
    """Brute-force reference: every atom bipartition, no merging of atoms."""
    if not is_connected(poset):
        raise Disconnected("cardinal factorization needs a connected poset")
    return _factor(poset, _splitter(exhaustive=True))


# ---------------------------------------------------------------------------
# Polytope factorization
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class FactorizationResult:
    """
    structure.expanded lists the prime factors with isomorphic copies replaced
    by one shared representative and grouped together; multiplicities gives the
    group sizes in order.
    """

    structure: ProductStructure
    multiplicities: tuple[int, ...]

    @property
    def kind(self) -> ProductKind:
        return self.structure.kind

    @property
    def polytope(self) -> Polytope:
        return self.structure.polytope

    @property
    def coordinates(self) -> tuple[tuple[int, ...], ...]:
        return self.structure.coordinates

    @property
    def factors(self) -> list[tuple[Polytope, int]]:
        out = []
        start = 0
        for m in self.multiplicities:
            out.append((self.structure.expanded[start], m))
            start += m
        return out


def canonical_key(q: Polytope) -> tuple[int, int, str]:
    return (q.face_count, len(q.flags), q.poset.wl_hash)


def _recap(poset: FacePoset, kind: ProductKind) -> Polytope:
    ends = kind.stripped_ends
    base = 0 if ends.has_min else -1
    normalised = poset.shifted(base - min(poset.ranks))
    capped = cap(normalised, ends)
    return Polytope(capped, max(capped.ranks))


def _rebuild_check(structure: ProductStructure) -> None:
    p = structure.polytope
    if not structure.expanded:
        if p.rank > 0:
            raise RebuildMismatch(f"rank {p.rank} polytope reported as a trivial product")
        return
    rebuilt = product_structure(structure.kind, structure.expanded)
    where = {t: i for i, t in enumerate(rebuilt.coordinates)}
    image = [where.get(t) for t in structure.coordinates]
    if None in image or len(set(image)) != len(rebuilt.coordinates) or len(image) != len(where):
        raise RebuildMismatch("coordinatization is not a bijection onto the rebuilt product")
    if any(p.poset.ranks[x] != rebuilt.polytope.poset.ranks[image[x]] for x in range(len(image))):
        raise RebuildMismatch("coordinatization does not preserve ranks")
    mapped = {(image[u], image[l]) for u, l in p.poset.covers}
    if mapped != set(rebuilt.polytope.poset.covers):
        raise RebuildMismatch("coordinatization does not preserve covers")


def factor(p: Polytope, kind: ProductKind) -> FactorizationResult:
    """Prime factorization of p under kind, verified by rebuilding the product."""
    if p.is_empty and kind is ProductKind.JOIN:
        return FactorizationResult(ProductStructure(kind, p, (), ((),)), ())
    if kind is ProductKind.TOPOLOGICAL and p.rank < 3:
        coords = tuple((x,) for x in range(p.face_count))
        return FactorizationResult(ProductStructure(kind, p, (p,), coords), (1,))

    ends = kind.stripped_ends
    dropped = set()
    if ends.has_min:
        dropped.add(p.minimum)
    if ends.has_max:
        dropped.add(p.maximum)
    stripped, sidx = p.poset.induced(x for x in range(p.face_count) if x not in dropped)
    cardinal = factor_cardinal(stripped)
    raw = [_recap(f, kind) for f in cardinal.factors]

    coords: list[tuple[int, ...]] = []
    for x in range(p.face_count):
        if x in sidx:
            coords.append(cardinal.coordinates[sidx[x]])
        elif x == p.minimum and ends.has_min:
            coords.append(tuple(q.minimum for q in raw))
        else:
            coords.append(tuple(q.maximum for q in raw))

    # Group isomorphic factors onto shared representatives, in canonical order.
    order = sorted(range(len(raw)), key=lambda j: canonical_key(raw[j]))
    reps: list[Polytope] = []
    rep_of: dict[int, tuple[int, dict[int, int]]] = {}
    for j in order:
        for r, rep in enumerate(reps):
            if canonical_key(rep) != canonical_key(raw[j]):
                continue
            mapping = is_isomorphic(raw[j].poset, rep.poset)
            if mapping is not None:
                rep_of[j] = (r, mapping)
                break
        else:
            rep_of[j] = (len(reps), {x: x for x in range(raw[j].face_count)})
            reps.append(raw[j])
    order.sort(key=lambda j: (canonical_key(reps[rep_of[j][0]]), rep_of[j][0]))

    expanded = tuple(reps[rep_of[j][0]] for j in order)
    coordinates = tuple(tuple(rep_of[j][1][t[j]] for j in order) for t in coords)
    multiplicities = tuple(len(list(g)) for _, g in itertools.groupby(order, key=lambda j: rep_of[j][0]))

    structure = ProductStructure(kind, p, expanded, coordinates)
    _rebuild_check(structure)
    log.debug("%s factorization: %d prime factor(s)", kind.value, len(expanded))
    return FactorizationResult(structure, multiplicities)


def is_prime(p: Polytope, kind: ProductKind) -> bool:
    result = factor(p, kind)
    return result.multiplicities == (1,)
