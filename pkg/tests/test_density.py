"""Reference density, functional-equation residual, stability envelope."""

import math

import numpy as np
import pytest

from dp_invariance.density import (
    ENVELOPE_FACTOR,
    GeneralizedDensity,
    check_stability,
    dir0_density,
    dir0_log_density,
    functional_eq_log_residual,
    stability_envelope,
    uniform_density,
)
from dp_invariance.dirichlet import DirichletParams, dirichlet_log_density
from dp_invariance.errors import BoundaryPointError, NonPositiveDeltaError
from dp_invariance.simplex import (
    ProbVector,
    identity_element,
    make_group_element,
    make_prob_vector,
    sample_group_element,
    sample_interior_point,
)


class TestReferenceDensity:
    def test_midpoint_value(self):
        assert dir0_log_density(make_prob_vector([1, 1])) == pytest.approx(
            math.log(4), abs=1e-14
        )

    def test_symmetric_three_point(self):
        theta = make_prob_vector([1, 1, 1])
        assert dir0_log_density(theta) == pytest.approx(3 * math.log(3), abs=1e-12)

    def test_matches_haldane_in_dimension_two(self):
        gen = np.random.default_rng(8)
        for _ in range(100):
            t = float(gen.uniform(0.01, 0.99))
            theta = make_prob_vector([t, 1 - t])
            haldane = -math.log(theta.weights[0] * theta.weights[1])
            assert dir0_log_density(theta) == pytest.approx(haldane, abs=1e-12)

    def test_boundary_rejected(self):
        with pytest.raises(BoundaryPointError):
            dir0_log_density(ProbVector(np.array([0.0, 1.0])))


class TestFunctionalEquationResidual:
    def test_exactness_sweep(self):
        gen = np.random.default_rng(77)
        pi = dir0_density()
        worst = 0.0
        for _ in range(2000):
            p = int(gen.integers(2, 11))
            theta = sample_interior_point(gen, p)
            g = sample_group_element(gen, p)
            worst = max(worst, abs(functional_eq_log_residual(pi, g, theta)))
        assert worst < 1e-10

    def test_identity_transform_is_exactly_zero(self):
        pi = uniform_density()
        theta = make_prob_vector([0.2, 0.8])
        assert functional_eq_log_residual(pi, identity_element(2), theta) == 0.0

    def test_uniform_density_residual_is_minus_log_ratio(self):
        # For a flat density the residual reduces to -log of the density ratio.
        value = functional_eq_log_residual(
            uniform_density(), make_group_element([2, 1]), make_prob_vector([1, 1])
        )
        assert value == pytest.approx(-math.log(8 / 9), abs=1e-12)
        assert value == pytest.approx(0.11778, abs=1e-5)

    def test_constant_freedom(self):
        theta = make_prob_vector([0.3, 0.2, 0.5])
        g = make_group_element([3, 1, 2])
        base = GeneralizedDensity(dir0_log_density, log_constant=0.0)
        shifted = GeneralizedDensity(dir0_log_density, log_constant=123.456)
        assert functional_eq_log_residual(base, g, theta) == functional_eq_log_residual(
            shifted, g, theta
        )

    def test_uniqueness_probe(self):
        # Any density -sum(a_i log theta_i) with some a_i != 1 leaves a residual.
        gen = np.random.default_rng(5)
        exponents = np.array([1.3, 1.0, 0.8])
        pi = GeneralizedDensity(
            lambda th: float(-(exponents * np.log(th.weights)).sum()), dim=3
        )
        worst = 0.0
        for _ in range(50):
            theta = sample_interior_point(gen, 3)
            g = sample_group_element(gen, 3)
            worst = max(worst, abs(functional_eq_log_residual(pi, g, theta)))
        assert worst > 1e-3


class TestStabilityEnvelope:
    def test_value_at_midpoint(self):
        value = stability_envelope(0.1, make_prob_vector([1, 1]))
        assert value == pytest.approx(0.1 * math.exp(1 / math.e) / 0.25, abs=1e-12)
        assert value == pytest.approx(0.57787, abs=1e-5)

    def test_linear_in_delta(self):
        theta = make_prob_vector([0.4, 0.6])
        assert stability_envelope(0.01, theta) == pytest.approx(
            stability_envelope(0.1, theta) / 10.0, rel=1e-12
        )

    def test_monotone_in_delta_and_theta(self):
        theta_mid = make_prob_vector([1, 1])
        theta_edge = make_prob_vector([0.05, 0.95])
        assert stability_envelope(0.2, theta_mid) > stability_envelope(0.1, theta_mid)
        assert stability_envelope(0.1, theta_edge) > stability_envelope(0.1, theta_mid)

    def test_nonpositive_delta_rejected(self):
        with pytest.raises(NonPositiveDeltaError):
            stability_envelope(0.0, make_prob_vector([1, 1]))

    def test_envelope_factor_constant(self):
        assert ENVELOPE_FACTOR == pytest.approx(1.444667861009766, abs=1e-12)


class TestCheckStability:
    def test_reference_density_trivial_pass(self):
        rep = check_stability(dir0_density(), trials=300, delta=0.1, rng_seed=9)
        assert rep.status == "pass"
        assert rep.max_premise_residual == 0.0
        assert rep.envelope_violations == 0

    def test_small_concentration_density_passes_with_fitted_delta(self):
        params = DirichletParams(0.01, make_prob_vector([1, 1]))
        pi = GeneralizedDensity(dirichlet_log_density(params), dim=2)
        rep = check_stability(pi, trials=1000, delta=None, rng_seed=40)
        assert rep.status == "pass"
        assert rep.delta_fitted
        assert rep.max_premise_residual > 0.0
        assert rep.max_premise_residual < rep.delta

    def test_flat_density_premise_not_met(self):
        rep = check_stability(uniform_density(), trials=300, delta=1e-6, rng_seed=10)
        assert rep.status == "premise_not_met"
        assert rep.max_premise_residual > 1e-6

    def test_loose_factor_never_tighter(self):
        params = DirichletParams(0.1, make_prob_vector([2, 1]))
        pi = GeneralizedDensity(dirichlet_log_density(params), dim=2)
        rep = check_stability(pi, trials=500, delta=None, rng_seed=3)
        assert rep.max_envelope_ratio_loose <= rep.max_envelope_ratio
        assert rep.envelope_factor_loose > rep.envelope_factor

    def test_dimension_generic_density_covers_many_dims(self):
        rep = check_stability(dir0_density(), trials=400, delta=0.5, rng_seed=77)
        assert len(rep.dims_checked) > 3

    def test_trials_validation(self):
        with pytest.raises(ValueError):
            check_stability(dir0_density(), trials=0, delta=0.1, rng_seed=1)

    def test_deterministic_given_seed(self):
        rep1 = check_stability(uniform_density(), trials=200, delta=5.0, rng_seed=2)
        rep2 = check_stability(uniform_density(), trials=200, delta=5.0, rng_seed=2)
        assert rep1 == rep2
