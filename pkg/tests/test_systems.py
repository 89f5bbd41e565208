"""
Tests for phase spaces, maps, perturbations, C0 distances and orbits.
"""

import numpy as np
import pytest

from src.errors import ConfigurationError, UnsupportedOperationError
from src.systems import (
    MapFamily,
    MapSpec,
    OrbitClosure,
    OrbitDirection,
    PerturbationSpec,
    PhaseSpace,
    c0_distance_estimate,
    c0_distance_pair,
    eval_inverse,
    eval_map,
    iterate,
    orbit,
    periodic_points,
    perturb,
)
from src.systems.phase_space import UPPER_POINT


class TestPhaseSpace:
    """Test metrics and normalization."""

    def test_circle_distance_wraps(self, circle):
        """Test that circle distances go the short way around."""
        assert circle.distance(0.1, 0.9) == pytest.approx(0.2)
        assert circle.distance(0.0, 0.5) == pytest.approx(0.5)

    def test_interval_distance(self, interval):
        """Test the plain metric on the interval."""
        assert interval.distance(0.1, 0.9) == pytest.approx(0.8)

    def test_normalize(self, circle, interval):
        """Test reduction mod 1 and clamping."""
        assert circle.normalize(-0.25) == pytest.approx(0.75)
        assert circle.normalize(-1e-18) == 0.0
        assert interval.normalize(1.5) == UPPER_POINT
        assert interval.normalize(-0.1) == 0.0

    def test_parse_unknown(self):
        """Test that unknown space names are rejected."""
        with pytest.raises(ConfigurationError, match="Unknown phase space"):
            PhaseSpace.parse("torus")

    def test_interval_support_out_of_range(self, interval):
        """Test that interval atoms must lie in [0, 1]."""
        with pytest.raises(ConfigurationError, match="must lie in"):
            interval.canonical_support(np.array([0.5, 1.2]))


class TestMapSpec:
    """Test map construction and evaluation."""

    def test_evaluate_families(self):
        """Test one value of every family."""
        assert eval_map(MapSpec.doubling(), 0.75) == pytest.approx(0.5)
        assert eval_map(MapSpec.rotation(0.5), 0.75) == pytest.approx(0.25)
        assert eval_map(MapSpec.tent(2.0), 0.25) == pytest.approx(0.5)
        assert eval_map(MapSpec.tent(2.0), 0.75) == pytest.approx(0.5)
        assert eval_map(MapSpec.identity(), 0.3) == pytest.approx(0.3)

    def test_logistic_peak_stays_in_space(self):
        """Test that T(1/2) = 1 is clamped back into [0, 1)."""
        value = eval_map(MapSpec.logistic(4.0), 0.5)
        assert value == UPPER_POINT
        assert value < 1.0

    def test_vectorized(self, doubling):
        """Test evaluation on arrays."""
        x = np.array([0.1, 0.6, 0.9])
        np.testing.assert_allclose(doubling.evaluate(x), [0.2, 0.2, 0.8])

    def test_piecewise_linear(self):
        """Test interpolation between nodes."""
        spec = MapSpec.piecewise_linear([0.0, 0.5, 1.0], [0.0, 1.0, 0.0])
        assert eval_map(spec, 0.25) == pytest.approx(0.5)
        assert spec.linear_pieces()[1].slope == pytest.approx(-2.0)

    def test_inverse_of_rotation(self, golden_rotation):
        """Test that eval_inverse undoes a rotation."""
        x = np.linspace(0.0, 0.99, 17)
        back = eval_inverse(golden_rotation, eval_map(golden_rotation, x))
        np.testing.assert_allclose(golden_rotation.space.distance(back, x), 0.0, atol=1e-12)

    def test_inverse_of_increasing_pwl(self):
        """Test the inverse of an increasing piecewise-linear homeomorphism."""
        spec = MapSpec.piecewise_linear([0.0, 0.5, 1.0], [0.0, 0.25, 1.0])
        assert spec.inverse_available
        assert eval_inverse(spec, 0.25) == pytest.approx(0.5)

    def test_doubling_not_invertible(self, doubling):
        """Test that inverting the doubling map is refused."""
        assert not doubling.inverse_available
        with pytest.raises(UnsupportedOperationError, match="not invertible"):
            eval_inverse(doubling, 0.5)

    def test_invalid_tent_slope(self):
        """Test tent slope range."""
        with pytest.raises(ConfigurationError, match="Tent slope"):
            MapSpec.tent(3.0)

    def test_wrong_parameter_count(self):
        """Test that a rotation needs exactly one angle."""
        with pytest.raises(ConfigurationError, match="takes 1 parameter"):
            MapSpec(MapFamily.ROTATION, (0.1, 0.2), PhaseSpace.circle())

    def test_invalid_breakpoints(self):
        """Test that breakpoints must run from 0 to 1."""
        with pytest.raises(ConfigurationError, match="Breakpoints"):
            MapSpec.piecewise_linear([0.0, 0.7, 0.5, 1.0], [0.0, 0.1, 0.2, 1.0])

    def test_unknown_family(self):
        """Test family name parsing."""
        assert MapFamily.parse(" Doubling ") is MapFamily.DOUBLING
        with pytest.raises(ConfigurationError, match="Unknown map family"):
            MapFamily.parse("henon")

    def test_logistic_is_not_piecewise_linear(self):
        """Test that exact Ulam rows are unavailable for the logistic map."""
        assert MapSpec.logistic(4.0).linear_pieces() is None

    def test_config_round_trip(self):
        """Test to_config/from_config with a perturbation."""
        spec = perturb(MapSpec.tent(1.8), PerturbationSpec.bump(0.3, 0.1, 0.02))
        assert MapSpec.from_config(spec.to_config()) == spec

    def test_from_config_missing_family(self):
        """Test that family is required."""
        with pytest.raises(ConfigurationError, match="family"):
            MapSpec.from_config({"params": "0.5"})

    def test_label(self, doubling):
        """Test that labels carry the perturbation."""
        spec = perturb(doubling, PerturbationSpec.additive(0.01))
        assert spec.label == "doubling+additive_constant(0.01)@circle"


class TestPerturbation:
    """Test perturbation operators."""

    def test_rotation_absorbs_constant(self, half_rotation):
        """Test that rotating by delta more is still a rotation."""
        spec = perturb(half_rotation, PerturbationSpec.additive(0.001))
        assert spec.family is MapFamily.ROTATION
        assert spec.params[0] == pytest.approx(0.501)
        assert spec.perturbations == ()

    def test_zero_amplitude_returns_input(self, doubling):
        """Test that a zero perturbation is the identity operation."""
        assert perturb(doubling, PerturbationSpec.additive(0.0)) is doubling

    def test_additive_shift(self, doubling):
        """Test S(x) = 2x + delta mod 1."""
        spec = perturb(doubling, PerturbationSpec.additive(0.01))
        assert eval_map(spec, 0.25) == pytest.approx(0.51)
        assert eval_map(spec, 0.6) == pytest.approx(0.21)

    def test_bump_displacement(self, circle):
        """Test that the bump reaches its amplitude at the center and vanishes outside."""
        pert = PerturbationSpec.bump(0.5, 0.1, 0.02)
        assert pert.displacement(0.5, circle) == pytest.approx(0.02)
        assert pert.displacement(0.7, circle) == 0.0
        assert pert.amplitude == 0.02

    def test_invalid_bump_width(self):
        """Test bump width range."""
        with pytest.raises(ConfigurationError, match="Bump width"):
            PerturbationSpec.bump(0.5, 0.8, 0.01)

    def test_unclamped_leaves_interval(self):
        """Test that an unclamped shift pushing the tent out of [0, 1] is rejected."""
        with pytest.raises(ConfigurationError, match="out of"):
            perturb(MapSpec.tent(2.0), PerturbationSpec.additive(0.05, clamp=False))

    def test_unclamped_reaching_right_endpoint(self, interval):
        """Test that a raw image touching 1 is accepted and evaluated at the largest interval point."""
        spec = perturb(MapSpec.identity(interval), PerturbationSpec.bump(0.5, 0.1, 0.05, clamp=False))

        assert float(spec.raw(1.0)) == 1.0
        assert eval_map(spec, 1.0) == UPPER_POINT
        assert eval_map(spec, 0.5) == pytest.approx(0.55)

    def test_clamped_stays_in_interval(self):
        """Test that clamping keeps images in [0, 1)."""
        spec = perturb(MapSpec.tent(2.0), PerturbationSpec.additive(0.05))
        values = np.asarray(spec.evaluate(np.linspace(0.0, 1.0, 101)))
        assert values.max() < 1.0
        assert values.min() >= 0.0


class TestC0Distance:
    """Test C0 distance estimates."""

    def test_additive_perturbation(self, doubling):
        """Test that an additive shift moves the map by exactly delta."""
        spec = perturb(doubling, PerturbationSpec.additive(0.01))
        assert c0_distance_estimate(doubling, spec) == pytest.approx(0.01)

    def test_pair_for_rotations(self, half_rotation):
        """Test that both distances are reported for homeomorphisms."""
        pair = c0_distance_pair(half_rotation, MapSpec.rotation(0.501))
        assert pair.forward == pytest.approx(0.001)
        assert pair.inverse == pytest.approx(0.001)
        assert pair.within(0.002)
        assert not pair.within(0.0005)

    def test_pair_without_inverse(self, doubling):
        """Test that the inverse distance is absent for non-invertible maps."""
        pair = c0_distance_pair(doubling, doubling)
        assert pair.as_tuple() == (0.0, None)

    def test_mismatched_spaces(self, doubling, identity):
        """Test that maps on different spaces cannot be compared."""
        with pytest.raises(ConfigurationError, match="different phase spaces"):
            c0_distance_estimate(doubling, identity)

    def test_monotone_in_nested_grids(self):
        """Test that refining a nested grid never lowers the estimate."""
        T = MapSpec.logistic(4.0)
        S = perturb(T, PerturbationSpec.bump(0.37, 0.05, 0.01))
        coarse = c0_distance_estimate(T, S, 64)
        fine = c0_distance_estimate(T, S, 4096)
        assert fine >= coarse


class TestOrbits:
    """Test orbit segments, closures and periodic points."""

    def test_forward_orbit(self):
        """Test a rational rotation orbit."""
        segment = orbit(MapSpec.rotation(0.25), 0.0, 4)
        np.testing.assert_allclose(segment.points, [0.0, 0.25, 0.5, 0.75])
        assert segment.direction is OrbitDirection.FORWARD
        assert segment.spec_id == "rotation(0.25)@circle"

    def test_two_sided_orbit(self, golden_rotation):
        """Test length and base index of a two-sided segment."""
        segment = orbit(golden_rotation, 0.3, 10, OrbitDirection.TWO_SIDED)
        assert len(segment) == 21
        assert segment.base_index == 10
        assert segment.points[10] == pytest.approx(0.3)
        assert segment.is_consistent_with(golden_rotation)

    def test_two_sided_needs_inverse(self, doubling):
        """Test that two-sided orbits of the doubling map are refused."""
        with pytest.raises(UnsupportedOperationError, match="non-invertible"):
            orbit(doubling, 0.1, 5, OrbitDirection.TWO_SIDED)

    def test_invalid_length(self, doubling):
        """Test that forward orbits need at least one point."""
        with pytest.raises(ConfigurationError, match="Orbit length"):
            orbit(doubling, 0.1, 0)

    def test_consistency_check_detects_foreign_map(self, golden_rotation, half_rotation):
        """Test that a segment does not pass as an orbit of another map."""
        segment = orbit(golden_rotation, 0.1, 50)
        assert not segment.is_consistent_with(half_rotation)

    def test_cycle_closing_keeps_periodic_orbit(self, doubling):
        """Test that the period-2 orbit {1/3, 2/3} survives 500 doublings."""
        segment = orbit(doubling, 1.0 / 3.0, 500, cycle_tol=1e-9)
        closure = OrbitClosure([1.0 / 3.0, 2.0 / 3.0], doubling.space)
        assert np.max(closure.distance(segment.points)) < 1e-9

    def test_iterate_yields_n_vectors(self, golden_rotation):
        """Test that iterate streams n vectors of the start shape."""
        steps = list(iterate(golden_rotation, [0.0, 0.5], 7))
        assert len(steps) == 7
        assert all(step.shape == (2,) for step in steps)

    def test_closure_distance(self, circle):
        """Test nearest-point distances with wrap-around."""
        closure = OrbitClosure([0.1, 0.9], circle)
        assert closure.distance(0.0) == pytest.approx(0.1)
        assert closure.distance(0.5) == pytest.approx(0.4)
        np.testing.assert_allclose(closure.distance(np.array([0.1, 0.95])), [0.0, 0.05], atol=1e-15)

    def test_covering_radius(self, circle, interval):
        """Test half the largest gap, with end gaps counting twice on the interval."""
        assert OrbitClosure([0.0, 0.5], circle).covering_radius == pytest.approx(0.25)
        assert OrbitClosure([0.5], interval).covering_radius == pytest.approx(0.5)

    def test_empty_closure(self, circle):
        """Test that an empty sample is rejected."""
        with pytest.raises(ConfigurationError, match="must not be empty"):
            OrbitClosure([], circle)

    def test_periodic_points_of_doubling(self, doubling):
        """Test fixed and period-2 points of x -> 2x."""
        np.testing.assert_allclose(periodic_points(doubling, 1), [0.0], atol=1e-12)
        np.testing.assert_allclose(periodic_points(doubling, 2), [0.0, 1.0 / 3.0, 2.0 / 3.0], atol=1e-12)

    def test_continued_fixed_point(self, doubling):
        """Test that 2x + 0.01 has its fixed point at 0.99."""
        S = perturb(doubling, PerturbationSpec.additive(0.01))
        np.testing.assert_allclose(periodic_points(S, 1), [0.99], atol=1e-12)

    def test_write_text(self, tmp_path):
        """Test the plain-text dump."""
        segment = orbit(MapSpec.rotation(0.25), 0.0, 4)
        path = tmp_path / "orbit.txt"
        segment.write_text(path)
        assert path.read_text().splitlines() == ["0.0", "0.25", "0.5", "0.75"]
