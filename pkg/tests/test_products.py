"""Tests for services/products.py — the four products and the named constructions."""

import itertools
import math
import random

import pytest

from services import catalog
from services.poset_core import EMPTY, dual, is_isomorphic, section, validate_polytope, vertex_figure
from services.products import (
    EmptyOperand,
    ProductKind,
    TopologicalRankTooLow,
    bipyr,
    direct_sum_by_duality,
    power,
    pri,
    product,
    product_structure,
    pyr,
)

SMALL = {
    "point": catalog.point(),
    "edge": catalog.edge(),
    "gon(3)": catalog.gon(3),
    "gon(4)": catalog.gon(4),
    "gon(5)": catalog.gon(5),
    "gon(6)": catalog.gon(6),
}

RANK_OFFSET = {
    ProductKind.JOIN: 1,
    ProductKind.CARTESIAN: 0,
    ProductKind.DIRECT_SUM: 0,
    ProductKind.TOPOLOGICAL: -1,
}


def _cases():
    for kind in ProductKind:
        for (a, p), (b, q) in itertools.combinations_with_replacement(SMALL.items(), 2):
            if kind is ProductKind.TOPOLOGICAL and min(p.rank, q.rank) < 2:
                continue
            yield pytest.param(kind, p, q, id=f"{a}-{kind.cli_name}-{b}")


class TestProductKind:
    def test_from_cli_name(self):
        assert ProductKind.from_name("dsum") is ProductKind.DIRECT_SUM

    def test_from_kind_name(self):
        assert ProductKind.from_name("Topological") is ProductKind.TOPOLOGICAL

    def test_unknown_name(self):
        with pytest.raises(ValueError, match="unknown product"):
            ProductKind.from_name("tensor")

    def test_steps(self):
        assert ProductKind.JOIN.steps(2) == 3
        assert ProductKind.CARTESIAN.steps(2) == 2
        assert ProductKind.TOPOLOGICAL.steps(2) == 1


class TestProducts:
    @pytest.mark.parametrize("kind,p,q", list(_cases()))
    def test_product_is_a_polytope_of_the_right_rank(self, kind, p, q):
        r = product(kind, p, q)
        assert r.rank == p.rank + q.rank + RANK_OFFSET[kind]
        report = validate_polytope(r.poset)
        assert report.is_polytope, f"violations: {[str(v) for v in report.violations]}"

    def test_empty_operand_rejected(self):
        with pytest.raises(EmptyOperand):
            product(ProductKind.CARTESIAN, EMPTY, catalog.edge())

    def test_topological_needs_rank_two(self):
        with pytest.raises(TopologicalRankTooLow, match="rank >= 2"):
            product(ProductKind.TOPOLOGICAL, catalog.edge(), catalog.gon(4))

    def test_no_operands(self):
        with pytest.raises(ValueError):
            product_structure(ProductKind.JOIN, [])

    def test_join_with_empty_is_identity(self):
        p = catalog.gon(5)
        assert is_isomorphic(product(ProductKind.JOIN, EMPTY, p).poset, p.poset) is not None

    @pytest.mark.parametrize("kind", [ProductKind.CARTESIAN, ProductKind.DIRECT_SUM])
    def test_point_is_trivial(self, kind):
        p = catalog.gon(5)
        assert is_isomorphic(product(kind, p, catalog.point()).poset, p.poset) is not None

    def test_pentagonal_prism(self):
        p = product(ProductKind.CARTESIAN, catalog.edge(), catalog.gon(5))
        assert p.f_vector == (10, 15, 7)
        assert len(p.flags) == 60

    def test_torus(self):
        p = catalog.torus(4, 2)
        assert p.rank == 3
        assert p.f_vector == (16, 32, 16)

    def test_power_is_a_left_fold(self):
        assert is_isomorphic(power(ProductKind.CARTESIAN, catalog.edge(), 3).poset, catalog.cube(3).poset) is not None

    def test_power_needs_positive_exponent(self):
        with pytest.raises(ValueError):
            power(ProductKind.JOIN, catalog.point(), 0)

    def test_products_commute_up_to_isomorphism(self):
        a = product(ProductKind.JOIN, catalog.edge(), catalog.gon(3))
        b = product(ProductKind.JOIN, catalog.gon(3), catalog.edge())
        assert is_isomorphic(a.poset, b.poset) is not None

    def test_direct_sum_agrees_with_duality_route(self):
        for q in (catalog.gon(3), catalog.gon(5), catalog.edge()):
            explicit = product(ProductKind.DIRECT_SUM, catalog.edge(), q)
            via_dual = direct_sum_by_duality(catalog.edge(), q)
            assert is_isomorphic(explicit.poset, via_dual.poset) is not None


class TestStructure:
    def test_coordinates_cover_every_face(self):
        s = product_structure(ProductKind.CARTESIAN, [catalog.edge(), catalog.gon(4)])
        assert len(s.coordinates) == s.polytope.face_count
        assert all(s.face_of[t] == i for i, t in enumerate(s.coordinates))

    def test_steps_follow_kind(self):
        s = product_structure(ProductKind.JOIN, [catalog.point(), catalog.gon(4)])
        assert s.steps == (1, 3)
        assert sum(s.steps) == s.polytope.rank + 1

    def test_capped_minimum_maps_to_factor_minima(self):
        factors = [catalog.edge(), catalog.gon(3)]
        s = product_structure(ProductKind.CARTESIAN, factors)
        assert s.coordinates[s.polytope.minimum] == tuple(q.minimum for q in factors)

    def test_join_sections_are_joins_of_sections(self):
        factors = [catalog.gon(3), catalog.gon(4)]
        s = product_structure(ProductKind.JOIN, factors)
        p = s.polytope
        rng = random.Random(3)
        pairs = [(x, y) for x in range(p.face_count) for y in range(p.face_count)
                 if x != y and p.poset.leq(x, y)]
        for x, y in rng.sample(pairs, 30):
            lower, upper = s.coordinates[x], s.coordinates[y]
            expected = product(
                ProductKind.JOIN,
                section(factors[0], lower[0], upper[0]),
                section(factors[1], lower[1], upper[1]),
            )
            assert is_isomorphic(section(p, x, y).poset, expected.poset) is not None, f"section {y}/{x}"

    def test_apex_vertex_figure_is_the_base(self):
        base = catalog.gon(4)
        s = product_structure(ProductKind.JOIN, [catalog.point(), base])
        apex = s.face_of[(catalog.point().maximum, base.minimum)]
        assert s.polytope.poset.ranks[apex] == 0
        assert is_isomorphic(vertex_figure(s.polytope, apex).poset, base.poset) is not None


class TestNamedConstructions:
    def test_pyramid(self):
        p = pyr(catalog.gon(4))
        assert p.rank == 3
        assert p.f_vector == (5, 8, 5)

    def test_prism(self):
        assert pri(catalog.gon(5)).f_vector == (10, 15, 7)

    def test_bipyramid(self):
        assert bipyr(catalog.gon(5)).f_vector == (7, 15, 10)

    def test_pyramid_over_triangle_is_tetrahedron(self):
        assert is_isomorphic(pyr(catalog.gon(3)).poset, catalog.simplex(3).poset) is not None

    def test_bipyramid_over_square_is_octahedron(self):
        assert is_isomorphic(bipyr(catalog.gon(4)).poset, catalog.cross(3).poset) is not None

    def test_prism_and_bipyramid_are_dual(self):
        assert is_isomorphic(dual(pri(catalog.gon(5))).poset, bipyr(catalog.gon(5)).poset) is not None


TRIPLES = {
    ProductKind.JOIN: (catalog.point, catalog.edge, lambda: catalog.gon(3)),
    ProductKind.CARTESIAN: (catalog.edge, lambda: catalog.gon(3), lambda: catalog.gon(4)),
    ProductKind.DIRECT_SUM: (catalog.edge, lambda: catalog.gon(3), lambda: catalog.gon(4)),
    ProductKind.TOPOLOGICAL: (lambda: catalog.gon(3), lambda: catalog.gon(4), lambda: catalog.gon(3)),
}


class TestProductLaws:
    @pytest.mark.parametrize("kind", list(ProductKind), ids=lambda k: k.cli_name)
    def test_associative(self, kind):
        a, b, c = (make() for make in TRIPLES[kind])
        left = product(kind, product(kind, a, b), c)
        right = product(kind, a, product(kind, b, c))
        assert is_isomorphic(left.poset, right.poset) is not None

    @pytest.mark.parametrize("p,q", [
        (catalog.edge(), catalog.gon(3)),
        (catalog.gon(4), catalog.gon(5)),
        (pyr(catalog.gon(4)), catalog.edge()),
    ])
    def test_join_commutes_with_duality(self, p, q):
        lhs = dual(product(ProductKind.JOIN, p, q))
        rhs = product(ProductKind.JOIN, dual(p), dual(q))
        assert is_isomorphic(lhs.poset, rhs.poset) is not None

    @pytest.mark.parametrize("kind,p,q", [
        (ProductKind.JOIN, catalog.point(), catalog.gon(4)),
        (ProductKind.JOIN, catalog.edge(), catalog.gon(3)),
        (ProductKind.CARTESIAN, catalog.edge(), catalog.gon(5)),
        (ProductKind.CARTESIAN, catalog.gon(3), catalog.gon(4)),
        (ProductKind.DIRECT_SUM, catalog.edge(), catalog.gon(5)),
        (ProductKind.DIRECT_SUM, catalog.gon(3), catalog.gon(4)),
        (ProductKind.TOPOLOGICAL, catalog.gon(4), catalog.gon(4)),
        (ProductKind.TOPOLOGICAL, catalog.gon(3), catalog.gon(5)),
    ])
    def test_flag_count(self, kind, p, q):
        n1, n2 = kind.steps(p.rank), kind.steps(q.rank)
        expected = len(p.flags) * len(q.flags) * math.comb(n1 + n2, n1)
        assert len(product(kind, p, q).flags) == expected
