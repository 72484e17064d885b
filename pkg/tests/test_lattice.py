import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from flattorus.lattice import (
    DimensionMismatch,
    NotALatticeVector,
    SingularBasis,
    angle_lattice,
    cell_contains,
    coset_shortest_vectors,
    covering_radius,
    deep_hole,
    dual_lattice,
    lagrange_reduce,
    lattice_from_basis,
    lattice_points_in_ball,
    orthogonal_sum,
    shortest_vector,
    voronoi_cell,
    voronoi_relevant_vectors,
)

from conftest import SQRT3, random_lattice


def brute_points(L, R=40):
    """Every lattice point B k with |k_i| <= R, zero excluded."""
    k = np.array([p for p in itertools.product(range(-R, R + 1), repeat=2) if any(p)])
    return k @ L.basis.T


def brute_shortest(L, R=40):
    return np.linalg.norm(brute_points(L, R), axis=1).min()


def as_set(P, nd=9):
    return {tuple(np.round(p, nd) + 0.0) for p in np.atleast_2d(P)}


class TestConstruction:
    def test_identity(self, Z2):
        assert np.array_equal(Z2.gram, np.eye(2))
        assert Z2.dim == 2

    def test_hexagonal_determinant(self, A2):
        assert A2.det == pytest.approx(SQRT3 / 2, abs=1e-15)

    def test_columns_are_input_rows(self):
        L = lattice_from_basis([[1, 2], [3, 4]])
        assert np.array_equal(L.basis[:, 0], [1, 2])
        assert np.allclose(L.gram, L.basis.T @ L.basis, atol=1e-12)

    def test_singular(self):
        with pytest.raises(SingularBasis):
            lattice_from_basis([[1, 1], [1, 1]])

    def test_ill_conditioned(self):
        with pytest.raises(SingularBasis):
            lattice_from_basis([[1, 0], [1, 1e-9]])

    def test_ragged(self):
        with pytest.raises(DimensionMismatch):
            lattice_from_basis([[1, 0], [1]])

    def test_one_dimensional(self):
        L = lattice_from_basis([[3.0]])
        assert L.dim == 1 and covering_radius(L) == 1.5
        assert shortest_vector(L)[1] == 3.0


class TestDual:
    def test_self_dual(self, Z2):
        assert np.allclose(dual_lattice(Z2).basis, np.eye(2))

    def test_diagonal(self):
        D = dual_lattice(lattice_from_basis([[2, 0], [0, 0.5]]))
        assert np.allclose(D.basis, np.diag([0.5, 2.0]))

    def test_hexagonal_det(self, A2):
        assert dual_lattice(A2).det == pytest.approx(2 / SQRT3, rel=1e-14)

    def test_integral_pairing(self, rng):
        L = random_lattice(rng)
        P = L.basis.T @ dual_lattice(L).basis
        assert np.allclose(P, np.eye(2), atol=1e-10)

    def test_involution_random(self, rng):
        for _ in range(200):
            B = rng.uniform(-5, 5, (2, 2))
            try:
                L = lattice_from_basis(B)
            except SingularBasis:
                continue
            assert np.allclose(dual_lattice(dual_lattice(L)).basis, L.basis, rtol=0, atol=1e-12)


class TestReduction:
    def test_skewed(self):
        red = lagrange_reduce(lattice_from_basis([[1, 0], [5, 1]]))
        assert as_set([red.b1, red.b2]) <= as_set([[1, 0], [-1, 0], [0, 1], [0, -1]])

    def test_identity_unchanged(self, Z2):
        red = lagrange_reduce(Z2)
        assert as_set([np.abs(red.b1), np.abs(red.b2)]) == as_set([[1, 0], [0, 1]])

    def test_hexagonal(self, A2):
        red = lagrange_reduce(A2)
        assert np.linalg.norm(red.b1) == pytest.approx(1)
        assert np.linalg.norm(red.b2) == pytest.approx(1)
        assert red.b1 @ red.b2 == pytest.approx(-0.5)

    def test_random_against_enumeration(self, rng):
        for _ in range(100):
            L = random_lattice(rng, -5, 5, 50)
            red = lagrange_reduce(L)
            U = red.transform
            assert abs(round(np.linalg.det(U))) == 1
            assert np.allclose(L.basis @ U, red.matrix)
            n1, n2 = np.linalg.norm(red.b1), np.linalg.norm(red.b2)
            assert n1 <= n2 * (1 + 1e-12)
            assert abs(red.b1 @ red.b2) <= n1**2 / 2 * (1 + 1e-12)
            assert red.b1 @ red.b2 <= 1e-12
            assert n1 == pytest.approx(brute_shortest(L), rel=1e-12)


class TestShortestVector:
    def test_values(self, Z2, A2):
        assert shortest_vector(Z2)[1] == 1
        assert shortest_vector(A2)[1] == pytest.approx(1)
        assert shortest_vector(lattice_from_basis([[3, 0], [0, 5]]))[1] == 3

    def test_orthogonal_sum(self):
        L = orthogonal_sum(lattice_from_basis([[2.0]]), lattice_from_basis([[3, 0], [0, 5]]))
        v, lam = shortest_vector(L)
        assert lam == 2 and L.dim == 3
        assert covering_radius(L) == pytest.approx(math.sqrt(1 + 2.25 + 6.25))
        assert np.allclose(deep_hole(L) ** 2, [1, 2.25, 6.25])


class TestCosets:
    def test_unit(self, Z2):
        assert as_set(coset_shortest_vectors(Z2, [1, 0])) == as_set([[1, 0], [-1, 0]])

    def test_four_way_tie(self, Z2):
        got = coset_shortest_vectors(Z2, [1, 1])
        assert as_set(got) == as_set([[1, 1], [1, -1], [-1, 1], [-1, -1]])

    def test_zero(self, Z2):
        assert np.array_equal(coset_shortest_vectors(Z2, [0, 0]), [[0, 0]])

    def test_not_lattice_vector(self, Z2):
        with pytest.raises(NotALatticeVector):
            coset_shortest_vectors(Z2, [0.5, 0])

    def test_far_representative(self, A2):
        v = A2.point([7, -3])
        got = coset_shortest_vectors(A2, v)
        # brute force over the same coset
        P = v + 2 * brute_points(A2, 20)
        P = np.vstack([P, v])
        n = np.linalg.norm(P, axis=1)
        assert np.linalg.norm(got[0]) == pytest.approx(n.min(), rel=1e-12)
        assert as_set(got) == as_set(P[n <= n.min() * (1 + 1e-9)])


class TestRelevant:
    def test_square(self, Z2):
        assert as_set(voronoi_relevant_vectors(Z2)) == as_set([[1, 0], [-1, 0], [0, 1], [0, -1]])

    def test_hexagonal(self, A2):
        R = voronoi_relevant_vectors(A2)
        assert len(R) == 6
        assert np.allclose(np.linalg.norm(R, axis=1), 1)

    def test_rectangle(self):
        R = voronoi_relevant_vectors(lattice_from_basis([[1, 0], [0, 10]]))
        assert as_set(R) == as_set([[1, 0], [-1, 0], [0, 10], [0, -10]])

    def test_count_matches_orthogonality(self, rng):
        for _ in range(100):
            L = random_lattice(rng, -5, 5, 100)
            red = lagrange_reduce(L)
            orth = abs(red.b1 @ red.b2) <= 1e-9 * np.linalg.norm(red.b1) * np.linalg.norm(red.b2)
            assert len(voronoi_relevant_vectors(L)) == (4 if orth else 6)
        for a, b in rng.uniform(0.1, 10, (20, 2)):
            L = lattice_from_basis([[a, 0], [0, b]]).transformed(np.array([[0.6, -0.8], [0.8, 0.6]]))
            assert len(voronoi_relevant_vectors(L)) == 4


class TestVoronoiCell:
    def test_square(self, Z2):
        c = voronoi_cell(Z2)
        assert c.kind == "rectangle"
        assert as_set(c.vertices) == as_set([[0.5, 0.5], [-0.5, 0.5], [0.5, -0.5], [-0.5, -0.5]])
        assert c.circumradius == pytest.approx(math.sqrt(2) / 2, abs=1e-15)
        assert c.inradius == 0.5

    def test_rectangle(self):
        c = voronoi_cell(lattice_from_basis([[2, 0], [0, 3]]))
        assert as_set(c.vertices) == as_set([[1, 1.5], [-1, 1.5], [1, -1.5], [-1, -1.5]])

    def test_hexagon(self, A2):
        c = voronoi_cell(A2)
        assert c.kind == "hexagon"
        assert c.circumradius == pytest.approx(1 / SQRT3, rel=1e-14)
        assert np.allclose(np.linalg.norm(c.vertices, axis=1), 1 / SQRT3)

    def test_counter_clockwise(self, A2):
        V = voronoi_cell(A2).vertices
        ang = np.unwrap(np.arctan2(V[:, 1], V[:, 0]))
        assert np.all(np.diff(ang) > 0)

    @pytest.mark.parametrize("scale", [3.0, 0.25])
    def test_covering_radius_homogeneous(self, Z2, scale):
        assert covering_radius(Z2.scaled(scale)) == pytest.approx(scale * math.sqrt(2) / 2, rel=1e-14)

    def test_covering_radius_values(self, Z2, A2):
        assert covering_radius(Z2) == pytest.approx(0.7071067811865476, abs=1e-16)
        assert covering_radius(A2) == pytest.approx(1 / SQRT3, rel=1e-14)
        assert np.linalg.norm(deep_hole(A2)) == pytest.approx(1 / SQRT3, rel=1e-14)

    def test_contains(self, Z2):
        c = voronoi_cell(Z2)
        assert cell_contains(c, [0, 0])
        assert cell_contains(c, [0.5, 0.5])
        assert not cell_contains(c, [0.51, 0])

    def test_random_cells(self, rng):
        for _ in range(100):
            L = random_lattice(rng, -5, 5, 1e3)
            c = voronoi_cell(L)
            assert len(c.vertices) in (4, 6)
            P = lattice_points_in_ball(L, 4 * c.circumradius)
            for x in c.vertices:
                assert np.all(np.linalg.norm(x) <= np.linalg.norm(x - P, axis=1) + 1e-9)
            assert c.area == pytest.approx(L.det, rel=1e-9)
            assert as_set(c.vertices, 7) == as_set(-c.vertices, 7)
            assert c.circumradius == pytest.approx(np.linalg.norm(c.vertices, axis=1).max())
            assert c.inradius == pytest.approx(shortest_vector(L)[1] / 2, rel=1e-12)


class TestBallEnumeration:
    def test_matches_brute_force(self, rng):
        for _ in range(20):
            L = random_lattice(rng, -3, 3, 20)
            r = 3 * shortest_vector(L)[1]
            P = brute_points(L, 60)
            want = P[np.linalg.norm(P, axis=1) <= r * (1 + 1e-9)]
            assert as_set(lattice_points_in_ball(L, r), 7) == as_set(want, 7)


@settings(max_examples=50, deadline=None)
@given(st.floats(60, 120))
def test_angle_lattice_cell_area(deg):
    L = angle_lattice(deg)
    assert voronoi_cell(L).area == pytest.approx(abs(math.sin(math.radians(deg))), rel=1e-9)
