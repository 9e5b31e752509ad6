"""Tests for services/factorization.py — cardinal and polytope prime factorization."""

import math
import random

import pytest

from services import catalog
from services.factorization import (
    Disconnected,
    TooLargeForOracle,
    canonical_key,
    factor,
    factor_cardinal,
    is_prime,
    oracle_factor,
)
from services.poset_core import EMPTY, Ends, is_isomorphic, strip
from services.products import ProductKind, bipyr, pri, product_structure, pyr
from tests.conftest import make_poset, relabel


def _names(result) -> list[tuple[int, int]]:
    """(face count, multiplicity) per factor: enough to tell the catalog atoms apart."""
    return [(q.face_count, m) for q, m in result.factors]


def _assert_factors(result, expected):
    got = result.factors
    assert len(got) == len(expected), f"got {_names(result)}"
    for (q, m), (want, k) in zip(got, expected):
        assert m == k
        assert is_isomorphic(q.poset, want.poset) is not None, f"factor with {q.face_count} faces"


class TestCardinal:
    def test_stripped_cube_is_three_stripped_edges(self):
        result = factor_cardinal(strip(catalog.cube(3), Ends.MIN))
        assert len(result.factors) == 3
        assert all(len(f) == 3 for f in result.factors)

    def test_stripped_polygon_is_prime(self):
        result = factor_cardinal(strip(catalog.gon(5), Ends.BOTH))
        assert len(result.factors) == 1

    def test_coordinates_are_a_bijection(self):
        poset = strip(pri(catalog.gon(5)), Ends.MIN)
        result = factor_cardinal(poset)
        assert len(set(result.coordinates)) == len(poset)
        assert sorted(len(f) for f in result.factors) == [3, 11]

    def test_single_face(self):
        result = factor_cardinal(make_poset([0], []))
        assert result.factors == ()

    def test_disconnected(self):
        with pytest.raises(Disconnected):
            factor_cardinal(make_poset([0, 0], []))

    def test_oracle_atom_limit(self):
        with pytest.raises(TooLargeForOracle, match="oracle limit"):
            oracle_factor(strip(catalog.cube(4), Ends.MIN))

    def test_relabelling_does_not_change_factor_sizes(self):
        poset = strip(catalog.cube(3), Ends.MIN)
        shuffled, _ = relabel(poset, seed=11)
        assert sorted(len(f) for f in factor_cardinal(shuffled).factors) == [3, 3, 3]


class TestFactor:
    def test_cube(self):
        result = factor(catalog.cube(3), ProductKind.CARTESIAN)
        _assert_factors(result, [(catalog.edge(), 3)])

    def test_pentagonal_prism(self):
        result = factor(pri(catalog.gon(5)), ProductKind.CARTESIAN)
        _assert_factors(result, [(catalog.edge(), 1), (catalog.gon(5), 1)])

    def test_square_prism_is_a_cube(self):
        result = factor(pri(catalog.gon(4)), ProductKind.CARTESIAN)
        _assert_factors(result, [(catalog.edge(), 3)])

    def test_simplex(self):
        result = factor(catalog.simplex(3), ProductKind.JOIN)
        _assert_factors(result, [(catalog.point(), 4)])

    def test_cross_polytope(self):
        result = factor(catalog.cross(3), ProductKind.DIRECT_SUM)
        _assert_factors(result, [(catalog.edge(), 3)])

    def test_torus(self):
        result = factor(catalog.torus(4, 2), ProductKind.TOPOLOGICAL)
        _assert_factors(result, [(catalog.gon(4), 2)])

    def test_bipyramid(self):
        result = factor(bipyr(catalog.gon(5)), ProductKind.DIRECT_SUM)
        _assert_factors(result, [(catalog.edge(), 1), (catalog.gon(5), 1)])

    def test_pyramid(self):
        result = factor(pyr(catalog.gon(4)), ProductKind.JOIN)
        _assert_factors(result, [(catalog.point(), 1), (catalog.gon(4), 1)])

    def test_mixed_topological(self):
        p = product_structure(ProductKind.TOPOLOGICAL, [catalog.gon(3), catalog.gon(5)]).polytope
        result = factor(p, ProductKind.TOPOLOGICAL)
        _assert_factors(result, [(catalog.gon(3), 1), (catalog.gon(5), 1)])

    def test_factors_are_in_canonical_order(self):
        result = factor(pri(catalog.gon(6)), ProductKind.CARTESIAN)
        keys = [canonical_key(q) for q, _ in result.factors]
        assert keys == sorted(keys)

    def test_coordinates_rebuild_the_product(self):
        result = factor(catalog.torus(3, 2), ProductKind.TOPOLOGICAL)
        rebuilt = product_structure(result.kind, result.structure.expanded)
        assert sorted(result.coordinates) == sorted(rebuilt.coordinates)

    def test_empty_join(self):
        assert factor(EMPTY, ProductKind.JOIN).factors == []

    def test_low_rank_topological_is_itself(self):
        p = catalog.gon(6)
        result = factor(p, ProductKind.TOPOLOGICAL)
        assert result.factors == [(p, 1)]


class TestPrimality:
    @pytest.mark.parametrize("kind", list(ProductKind))
    @pytest.mark.parametrize("p", [5, 6, 7, 8])
    def test_larger_polygons_are_prime(self, kind, p):
        assert is_prime(catalog.gon(p), kind)

    def test_triangle_is_a_join_of_points(self):
        assert not is_prime(catalog.gon(3), ProductKind.JOIN)
        _assert_factors(factor(catalog.gon(3), ProductKind.JOIN), [(catalog.point(), 3)])

    def test_triangle_is_otherwise_prime(self):
        for kind in (ProductKind.CARTESIAN, ProductKind.DIRECT_SUM, ProductKind.TOPOLOGICAL):
            assert is_prime(catalog.gon(3), kind)

    @pytest.mark.parametrize("kind", [ProductKind.CARTESIAN, ProductKind.DIRECT_SUM])
    def test_square_is_a_power_of_edges(self, kind):
        _assert_factors(factor(catalog.gon(4), kind), [(catalog.edge(), 2)])

    def test_square_is_join_prime(self):
        assert is_prime(catalog.gon(4), ProductKind.JOIN)

    def test_pyramid_depends_on_kind(self):
        p = pyr(catalog.gon(5))
        assert is_prime(p, ProductKind.CARTESIAN)
        assert not is_prime(p, ProductKind.JOIN)

    def test_tesseract_is_not_prime(self):
        assert not is_prime(catalog.cube(4), ProductKind.CARTESIAN)


# Atoms per kind and a bound on the atom count of the stripped product, so
# the brute-force oracle stays under its limit.
_POOLS = {
    ProductKind.JOIN: ([catalog.point(), catalog.edge(), catalog.gon(3), catalog.gon(4), catalog.gon(5)],
                       lambda fs: sum(len(q.faces_of_rank(0)) for q in fs) <= 12),
    ProductKind.CARTESIAN: ([catalog.edge(), catalog.gon(3), catalog.gon(4), catalog.gon(5), catalog.gon(6)],
                            lambda fs: math.prod(len(q.faces_of_rank(0)) for q in fs) <= 14),
    ProductKind.DIRECT_SUM: ([catalog.edge(), catalog.gon(3), catalog.gon(4), catalog.gon(5), catalog.gon(6)],
                             lambda fs: sum(len(q.faces_of_rank(0)) for q in fs) <= 14),
    ProductKind.TOPOLOGICAL: ([catalog.gon(3), catalog.gon(4), catalog.gon(5), catalog.gon(6)],
                              lambda fs: math.prod(q.face_count for q in fs) <= 1000),
}


def _random_products(count: int, seed: int = 20):
    rng = random.Random(seed)
    kinds = list(ProductKind)
    cases = []
    while len(cases) < count:
        kind = kinds[len(cases) % len(kinds)]
        pool, fits = _POOLS[kind]
        operands = [rng.choice(pool) for _ in range(rng.randint(2, 3))]
        if fits(operands):
            cases.append((kind, operands))
    return cases


def _same_up_to_isomorphism(got: list, want: list) -> bool:
    """Multiset equality of face posets up to isomorphism and a shift of ranks."""
    if len(got) != len(want):
        return False
    got = [g.shifted(-min(g.ranks)) for g in got]
    remaining = [w.shifted(-min(w.ranks)) for w in want]
    for g in got:
        match = next((i for i, w in enumerate(remaining) if is_isomorphic(g, w) is not None), None)
        if match is None:
            return False
        remaining.pop(match)
    return True


def _expanded(result) -> list:
    return [q.poset for q, m in result.factors for _ in range(m)]


class TestAgainstOracle:
    @pytest.mark.parametrize("kind,operands", _random_products(20))
    def test_fast_split_matches_oracle(self, kind, operands):
        p = product_structure(kind, operands).polytope
        stripped = strip(p, kind.stripped_ends)
        fast = factor_cardinal(stripped)
        slow = oracle_factor(stripped)
        assert _same_up_to_isomorphism(list(fast.factors), list(slow.factors))

    @pytest.mark.parametrize("kind,operands", _random_products(20))
    def test_factor_recovers_the_operands(self, kind, operands):
        p = product_structure(kind, operands).polytope
        got = _expanded(factor(p, kind))
        # Operands may factor further: compare against the union of their own factorizations.
        want = [q for operand in operands for q in _expanded(factor(operand, kind))]
        assert _same_up_to_isomorphism(got, want), f"{len(got)} factors, expected {len(want)}"

    @pytest.mark.parametrize("kind,left,right", [
        (ProductKind.TOPOLOGICAL, lambda: catalog.torus(3, 2), lambda: catalog.gon(4)),
        (ProductKind.CARTESIAN, lambda: catalog.cube(3), lambda: catalog.gon(5)),
        (ProductKind.JOIN, lambda: pyr(catalog.gon(5)), lambda: catalog.gon(4)),
        (ProductKind.DIRECT_SUM, lambda: bipyr(catalog.gon(5)), lambda: catalog.gon(3)),
    ])
    def test_factorization_of_a_product_is_the_union(self, kind, left, right):
        a, b = left(), right()
        got = _expanded(factor(product_structure(kind, [a, b]).polytope, kind))
        want = _expanded(factor(a, kind)) + _expanded(factor(b, kind))
        assert _same_up_to_isomorphism(got, want)
