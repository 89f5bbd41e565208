"""
Tests for Wasserstein-1 distances, hull projections and Hausdorff distances between measure sets.
"""

import itertools
import typing

import numpy as np
import pytest

from src.errors import MeasureError
from src.measures import (
    DiscreteMeasure,
    MeasureSet,
    cost_matrix,
    directed_distance,
    hausdorff_distance,
    transport_cost,
    w1_distance,
    w1_matrix,
    w1_point_to_hull,
    w1_point_to_set,
)


def random_measure(rng, space, max_atoms):
    k = int(rng.integers(1, max_atoms + 1))
    return DiscreteMeasure.from_atoms(rng.random(k), rng.dirichlet(np.ones(k)), space)


def vertex_enumeration_cost(mu, nu):
    """Minimum transport cost over all basic feasible solutions of the transportation polytope."""
    m, n = len(mu), len(nu)
    costs = cost_matrix(mu, nu).ravel()
    a_eq = np.zeros((m + n, m * n))
    for i in range(m):
        a_eq[i, i * n : (i + 1) * n] = 1.0
    for j in range(n):
        a_eq[m + j, j::n] = 1.0
    b_eq = np.concatenate([mu.weights, nu.weights])

    best = np.inf
    for basis in itertools.combinations(range(m * n), m + n - 1):
        columns = list(basis)
        solution, *_ = np.linalg.lstsq(a_eq[:, columns], b_eq, rcond=None)
        if np.max(np.abs(a_eq[:, columns] @ solution - b_eq)) > 1e-12 or solution.min() < -1e-12:
            continue
        best = min(best, float(costs[columns] @ solution))
    return best


def random_set(rng, space, size, max_atoms=4):
    return MeasureSet(tuple(random_measure(rng, space, max_atoms) for _ in range(size)))


class TestW1Distance:
    """Test the exact W1 solvers against each other and against closed forms."""

    def test_dirac_pair(self, interval):
        """Test that W1 between two Dirac masses is their distance."""
        mu = DiscreteMeasure.dirac(0.2, interval)
        nu = DiscreteMeasure.dirac(0.7, interval)

        assert w1_distance(mu, nu) == pytest.approx(0.5)

    def test_circle_uses_arc_length(self, circle):
        """Test that circle transport takes the short way around."""
        mu = DiscreteMeasure.dirac(0.05, circle)
        nu = DiscreteMeasure.dirac(0.95, circle)

        assert w1_distance(mu, nu) == pytest.approx(0.1)

    def test_lp_matches_cdf_formula(self, interval, rng):
        """Test that the transport LP agrees with the CDF integral on 200 random interval pairs."""
        for _ in range(200):
            mu = random_measure(rng, interval, 12)
            nu = random_measure(rng, interval, 12)

            assert transport_cost(mu, nu) == pytest.approx(w1_distance(mu, nu), abs=1e-9)

    def test_lp_matches_vertex_enumeration(self, interval, circle, rng):
        """Test that the transport LP agrees with exhaustive vertex enumeration for up to 4 atoms."""
        for space in (interval, circle):
            for _ in range(40):
                mu = random_measure(rng, space, 4)
                nu = random_measure(rng, space, 4)

                assert transport_cost(mu, nu) == pytest.approx(vertex_enumeration_cost(mu, nu), abs=1e-9)

    def test_symmetric(self, circle, rng):
        """Test exact symmetry of the distance."""
        for _ in range(20):
            mu = random_measure(rng, circle, 6)
            nu = random_measure(rng, circle, 6)

            assert w1_distance(mu, nu) == w1_distance(nu, mu)

    def test_triangle_inequality(self, circle, rng):
        """Test the triangle inequality on random triples."""
        for _ in range(20):
            mu, nu, xi = (random_measure(rng, circle, 5) for _ in range(3))

            assert w1_distance(mu, xi) <= w1_distance(mu, nu) + w1_distance(nu, xi) + 1e-12

    def test_bounded_by_diameter(self, circle, rng):
        """Test that no circle distance exceeds 1/2."""
        for _ in range(20):
            assert w1_distance(random_measure(rng, circle, 6), random_measure(rng, circle, 6)) <= 0.5 + 1e-12

    def test_mismatched_spaces(self, interval, circle):
        """Test that measures on different spaces cannot be compared."""
        with pytest.raises(MeasureError, match="different phase spaces"):
            w1_distance(DiscreteMeasure.dirac(0.1, interval), DiscreteMeasure.dirac(0.1, circle))

    def test_matrix_diagonal_zero(self, interval, rng):
        """Test that a family compared with itself has a zero symmetric matrix."""
        family = [random_measure(rng, interval, 5) for _ in range(4)]

        matrix = w1_matrix(family, family)

        assert np.all(np.diag(matrix) == 0.0)
        assert np.array_equal(matrix, matrix.T)


class TestHullProjection:
    """Test the distance from a measure to the convex hull of a family."""

    def test_mixture_lies_in_hull(self, circle):
        """Test that a mixture of the extremes is at distance zero with its weights recovered."""
        a = DiscreteMeasure.dirac(0.0, circle)
        b = DiscreteMeasure.uniform([1 / 3, 2 / 3], circle)
        mix = DiscreteMeasure.mixture([a, b], [0.25, 0.75])

        projection = w1_point_to_hull(mix, [a, b])

        assert projection.value == 0.0
        assert projection.lambdas == pytest.approx([0.25, 0.75], abs=1e-8)

    def test_hull_closer_than_extremes(self, interval, rng):
        """Test that the hull distance never exceeds the distance to the nearest extreme."""
        for _ in range(15):
            mu = random_measure(rng, interval, 5)
            extremes = [random_measure(rng, interval, 4) for _ in range(3)]
            finite = MeasureSet(tuple(extremes))

            hull_value = w1_point_to_set(mu, finite, hull=True)

            assert hull_value <= w1_point_to_set(mu, finite) + 1e-9
            assert hull_value >= 0.0

    def test_point_to_set_signature(self):
        """Test that the set argument is typed as a MeasureSet."""
        hints = typing.get_type_hints(w1_point_to_set, localns={"MeasureSet": MeasureSet})

        assert hints["measure_set"] is MeasureSet
        assert hints["return"] is float

    def test_single_extreme(self, interval):
        """Test that a one-element family reduces to plain W1."""
        mu = DiscreteMeasure.dirac(0.1, interval)
        nu = DiscreteMeasure.dirac(0.4, interval)

        projection = w1_point_to_hull(mu, [nu])

        assert projection.value == pytest.approx(0.3)
        assert projection.lambdas.tolist() == [1.0]

    def test_empty_family(self, interval):
        """Test that the hull of nothing is rejected."""
        with pytest.raises(MeasureError, match="empty set"):
            w1_point_to_hull(DiscreteMeasure.dirac(0.1, interval), [])


class TestHausdorff:
    """Test the sum-of-directed-terms Hausdorff distance."""

    def test_properties_on_random_sets(self, circle, rng):
        """Test symmetry, zero on equal sets and the sum decomposition on 100 random pairs."""
        for _ in range(100):
            P = random_set(rng, circle, int(rng.integers(1, 4))).deduplicated()
            Q = random_set(rng, circle, int(rng.integers(1, 4))).deduplicated()

            forward = hausdorff_distance(P, Q)
            backward = hausdorff_distance(Q, P)

            assert forward.total == backward.total
            assert forward.directed_pq == backward.directed_qp
            assert forward.total == forward.directed_pq + forward.directed_qp
            assert hausdorff_distance(P, P).total == 0.0
            assert forward.total > 0.0

    def test_zero_iff_equal(self, interval):
        """Test that sets with the same members in another order are at distance zero."""
        a = DiscreteMeasure.dirac(0.2, interval)
        b = DiscreteMeasure.dirac(0.7, interval)

        assert hausdorff_distance(MeasureSet((a, b)), MeasureSet((b, a))).total == 0.0
        assert hausdorff_distance(MeasureSet((a,)), MeasureSet((a, b))).total > 0.0

    def test_directed_terms(self, interval):
        """Test that a subset sits at directed distance zero from its superset."""
        a = DiscreteMeasure.dirac(0.2, interval)
        b = DiscreteMeasure.dirac(0.7, interval)
        small, large = MeasureSet((a,)), MeasureSet((a, b))

        result = hausdorff_distance(small, large)

        assert result.directed_pq == 0.0
        assert result.directed_qp == pytest.approx(0.5)
        assert tuple(result) == result.as_tuple()
        assert directed_distance(large, small) == pytest.approx(0.5)

    def test_hull_mode_absorbs_mixtures(self, circle):
        """Test that a mixture of the extremes adds nothing in hull mode but does in finite mode."""
        a = DiscreteMeasure.dirac(0.0, circle)
        b = DiscreteMeasure.dirac(0.5, circle)
        mix = DiscreteMeasure.mixture([a, b], [0.5, 0.5])
        P = MeasureSet((a, b))
        Q = MeasureSet((a, b, mix))

        assert hausdorff_distance(P, Q, hull=True).total == pytest.approx(0.0, abs=1e-9)
        assert hausdorff_distance(P, Q, hull=False).total == pytest.approx(0.25)

    def test_hull_mode_symmetric(self, interval, rng):
        """Test that the hull-mode value is symmetric up to LP tolerance."""
        for _ in range(10):
            P = random_set(rng, interval, 3)
            Q = random_set(rng, interval, 2)

            assert hausdorff_distance(P, Q, hull=True).total == pytest.approx(
                hausdorff_distance(Q, P, hull=True).total, abs=1e-8
            )

    def test_hull_flags_must_agree(self, interval):
        """Test that sets with different hull flags need an explicit mode."""
        a = MeasureSet((DiscreteMeasure.dirac(0.2, interval),), hull=True)
        b = MeasureSet((DiscreteMeasure.dirac(0.2, interval),), hull=False)

        with pytest.raises(MeasureError, match="disagree on hull semantics"):
            hausdorff_distance(a, b)
        assert hausdorff_distance(a, b, hull=False).total == 0.0
