"""Dirichlet (concentration, mean) parametrization: pdf, sampler, margins."""

import math
import os

import numpy as np
import pytest
from scipy.stats import beta as beta_dist

from dp_invariance.dirichlet import (
    DirichletParams,
    eps_invariance_margin,
    log_c_eps,
    log_pdf,
    sample,
)
from dp_invariance.errors import (
    BoundaryPointError,
    DimensionMismatchError,
    ZeroMeanComponentError,
)
from dp_invariance.kstats import ks_critical_value, ks_two_sample_distance
from dp_invariance.rng import substream
from dp_invariance.simplex import ProbVector, make_prob_vector

HALF = make_prob_vector([1, 1])


class TestParams:
    def test_concentration_vector_identity(self):
        params = DirichletParams(2.0, make_prob_vector([3, 1]))
        np.testing.assert_allclose(params.concentration_vector, [1.5, 0.5])

    def test_round_trip(self):
        params = DirichletParams(0.7, make_prob_vector([0.2, 0.3, 0.5]))
        back = DirichletParams.from_concentration_vector(params.concentration_vector)
        assert back.concentration == pytest.approx(params.concentration, abs=1e-14)
        np.testing.assert_allclose(back.mean.weights, params.mean.weights, atol=1e-14)

    def test_positive_concentration_required(self):
        with pytest.raises(ValueError):
            DirichletParams(0.0, HALF)


class TestNormalizingConstant:
    def test_unit_concentration_closed_form(self):
        # Gamma(1) / Gamma(1/2)^2 = 1/pi
        assert log_c_eps(DirichletParams(1.0, HALF)) == pytest.approx(
            -math.log(math.pi), abs=1e-13
        )

    def test_lgamma_oracle_small_concentration(self):
        value = log_c_eps(DirichletParams(0.1, HALF))
        oracle = math.lgamma(0.1) - 2 * math.lgamma(0.05)
        assert value == pytest.approx(oracle, abs=1e-12)
        assert math.exp(value) == pytest.approx(0.0251, abs=1e-4)

    def test_gamma_two_is_zero(self):
        assert log_c_eps(DirichletParams(2.0, HALF)) == pytest.approx(0.0, abs=1e-14)

    def test_zero_mean_component_rejected(self):
        with pytest.raises(ZeroMeanComponentError):
            log_c_eps(DirichletParams(1.0, ProbVector(np.array([0.0, 1.0]))))


class TestLogPdf:
    def test_uniform_on_simplex(self):
        params = DirichletParams(2.0, HALF)  # concentration vector (1, 1)
        for t in (0.2, 0.5, 0.9):
            assert log_pdf(params, make_prob_vector([t, 1 - t])) == pytest.approx(
                0.0, abs=1e-13
            )

    def test_substitution_value(self):
        value = log_pdf(DirichletParams(1.0, HALF), HALF)
        assert value == pytest.approx(math.log(2 / math.pi), abs=1e-13)

    @pytest.mark.parametrize(
        "concentration, mean",
        [(4.0, [0.3, 0.7]), (6.0, [0.2, 0.3, 0.5])],
    )
    def test_integrates_to_one(self, concentration, mean):
        # Monte Carlo over the flat law on the simplex: for theta ~ Dir(1, .., 1)
        # (density (p-1)! on the chart), E[pdf / (p-1)!] estimates the integral.
        params = DirichletParams(concentration, make_prob_vector(mean))
        p = params.dim
        gen = np.random.default_rng(123)
        draws = gen.dirichlet(np.ones(p), size=200_000)
        draws = draws[draws.min(axis=1) > 1e-12]
        values = np.array(
            [math.exp(log_pdf(params, ProbVector(row))) for row in draws[:50_000]]
        ) / math.factorial(p - 1)
        estimate = values.mean()
        se = values.std(ddof=1) / math.sqrt(values.size)
        assert abs(estimate - 1.0) < 3 * se

    def test_boundary_rejected(self):
        with pytest.raises(BoundaryPointError):
            log_pdf(DirichletParams(1.0, HALF), ProbVector(np.array([0.0, 1.0])))

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatchError):
            log_pdf(DirichletParams(1.0, HALF), make_prob_vector([1, 1, 1]))


class TestSampler:
    def test_rows_on_simplex(self):
        out = sample(DirichletParams(2.0, HALF), rng_seed=1, draws=1000)
        assert out.points.shape == (1000, 2)
        np.testing.assert_allclose(out.points.sum(axis=1), 1.0, atol=1e-12)
        assert np.all(out.points >= 0)

    def test_mean_convergence(self):
        out = sample(DirichletParams(2.0, HALF), rng_seed=2, draws=100_000)
        np.testing.assert_allclose(out.points.mean(axis=0), [0.5, 0.5], atol=0.005)

    def test_large_concentration_concentrates(self):
        out = sample(DirichletParams(1e6, make_prob_vector([0.3, 0.7])), rng_seed=3, draws=2000)
        assert np.abs(out.points - np.array([0.3, 0.7])).max() < 0.01

    def test_fixed_seed_reproducible(self):
        a = sample(DirichletParams(0.5, HALF), rng_seed=9, draws=500)
        b = sample(DirichletParams(0.5, HALF), rng_seed=9, draws=500)
        np.testing.assert_array_equal(a.points, b.points)
        assert a.clamp_count == b.clamp_count

    def test_marginal_matches_beta_inverse_cdf_draws(self):
        # theta_1 under the sampler vs inverse-CDF draws of Beta(a F0_1, a (1-F0_1)).
        params = DirichletParams(3.0, make_prob_vector([0.4, 0.6]))
        draws = 10_000
        ours = sample(params, rng_seed=17, draws=draws).points[:, 0]
        u = substream(18).random(draws)
        reference = beta_dist.ppf(u, 1.2, 1.8)
        stat = ks_two_sample_distance(ours, reference)
        assert stat < ks_critical_value(draws, draws, level=0.01)

    def test_tiny_shapes_stay_positive_and_report_clamps(self):
        params = DirichletParams(0.001, make_prob_vector([1, 1, 1]))
        out = sample(params, rng_seed=5, draws=5000)
        assert np.all(out.points > 0)
        np.testing.assert_allclose(out.points.sum(axis=1), 1.0, atol=1e-12)
        assert out.clamp_count >= 0

    def test_tiny_shape_mean_still_correct(self):
        # With concentration 0.01 most mass sits in a corner per draw, but the
        # average across draws must still match the mean vector.
        params = DirichletParams(0.01, make_prob_vector([0.25, 0.75]))
        out = sample(params, rng_seed=6, draws=60_000)
        np.testing.assert_allclose(out.points.mean(axis=0), [0.25, 0.75], atol=0.01)

    def test_draws_validation(self):
        with pytest.raises(ValueError):
            sample(DirichletParams(1.0, HALF), rng_seed=1, draws=0)

    def test_worker_count_does_not_change_draws(self):
        # 9000 draws span multiple chunks, so threads genuinely interleave.
        params = DirichletParams(1.5, make_prob_vector([0.2, 0.8]))
        baseline = sample(params, rng_seed=12, draws=9000)
        os.environ["DP_INVARIANCE_THREADS"] = "8"
        try:
            parallel = sample(params, rng_seed=12, draws=9000)
        finally:
            os.environ.pop("DP_INVARIANCE_THREADS")
        np.testing.assert_array_equal(baseline.points, parallel.points)
        assert baseline.clamp_count == parallel.clamp_count


class TestInvarianceMargin:
    def test_record_fields(self):
        margin = eps_invariance_margin(DirichletParams(0.1, HALF))
        assert margin.c_eps == pytest.approx(0.0251, abs=1e-4)
        assert margin.sup_margin == pytest.approx(margin.c_eps * math.exp(math.e), rel=1e-12)
        assert margin.sup_margin_stability == pytest.approx(
            margin.c_eps * math.exp(1 / math.e), rel=1e-12
        )
        assert margin.delta_criterion == margin.c_eps

    def test_unit_concentration_value(self):
        margin = eps_invariance_margin(DirichletParams(1.0, HALF))
        assert margin.c_eps == pytest.approx(1 / math.pi, abs=1e-14)

    def test_monotone_decay_to_zero(self):
        gen = np.random.default_rng(44)
        for p in range(2, 11):
            mean = make_prob_vector(gen.dirichlet(np.ones(p)) + 1e-9)
            values = [
                eps_invariance_margin(DirichletParams(eps, mean)).c_eps
                for eps in (0.5, 0.1, 0.01, 0.001)
            ]
            assert all(a > b for a, b in zip(values, values[1:]))
            assert values[-1] < 1e-2
