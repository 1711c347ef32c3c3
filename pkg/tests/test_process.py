"""Base CDFs, conjugate updating, process samplers, uniform bound."""

import numpy as np
import pytest
from scipy.stats import beta as beta_dist

from dp_invariance.dirichlet import DirichletParams
from dp_invariance.errors import (
    EmptyDataError,
    InconsistentCountError,
    UnsortedEdgesError,
    ZeroMassCellError,
)
from dp_invariance.kstats import ks_critical_value, ks_one_sample_distance
from dp_invariance.process import (
    DiscreteCDFDraw,
    DPParams,
    EmpiricalCDF,
    GaussianCDF,
    MixtureCDF,
    UniformCDF,
    bayesian_bootstrap_draw,
    empirical_cdf,
    finite_marginal,
    posterior_update,
    process_invariance_bound,
    sample_stick_breaking,
)


class TestBaseCDFs:
    def test_uniform_cdf_and_inverse(self):
        base = UniformCDF(0.0, 2.0)
        np.testing.assert_allclose(base.cdf_at([-1.0, 0.5, 1.0, 3.0]), [0, 0.25, 0.5, 1])
        assert base.inverse_cdf(0.25) == pytest.approx(0.5)

    def test_gaussian_round_trip(self):
        base = GaussianCDF(1.0, 2.0)
        u = np.linspace(0.01, 0.99, 25)
        np.testing.assert_allclose(base.cdf_at(base.inverse_cdf(u)), u, atol=1e-12)

    def test_empirical_cdf_counts(self):
        e = empirical_cdf([1.0, 2.0, 2.0])
        np.testing.assert_array_equal(e.atoms, [1.0, 2.0])
        np.testing.assert_allclose(e.masses, [1 / 3, 2 / 3])

    def test_empirical_cdf_right_continuous_and_total(self):
        e = empirical_cdf([3.0, 1.0, 2.0, 2.0])
        assert e.cdf_at(0.99) == 0.0
        assert e.cdf_at(1.0) == pytest.approx(0.25)
        assert e.cdf_at(e.atoms.max()) == pytest.approx(1.0)

    def test_single_atom_empirical_allowed_as_base(self):
        e = empirical_cdf([5.0])
        assert e.cdf_at(5.0) == 1.0
        assert float(e.inverse_cdf(0.5)) == 5.0

    def test_empty_data_rejected(self):
        with pytest.raises(EmptyDataError):
            empirical_cdf([])

    def test_empirical_generalized_inverse(self):
        e = empirical_cdf([1.0, 2.0, 2.0])
        assert float(e.inverse_cdf(0.2)) == 1.0
        assert float(e.inverse_cdf(1 / 3)) == 1.0
        assert float(e.inverse_cdf(0.34)) == 2.0
        assert float(e.inverse_cdf(1.0)) == 2.0

    def test_mixture_cdf_and_inverse_round_trip(self):
        mix = MixtureCDF(
            weights=np.array([0.25, 0.75]),
            components=(UniformCDF(0.0, 1.0), empirical_cdf([0.2, 0.7, 0.7])),
        )
        assert float(mix.cdf_at(0.5)) == pytest.approx(0.25 * 0.5 + 0.75 * (1 / 3))
        for u in (0.01, 0.1, 0.4, 0.6, 0.9, 0.99):
            x = mix.inverse_cdf(u)
            assert float(mix.cdf_at(x)) >= u - 1e-9
            below = x - 1e-9 * max(1.0, abs(x))
            assert float(mix.cdf_at(below)) <= u + 1e-9

    def test_cell_masses_validation(self):
        base = UniformCDF(0.0, 1.0)
        with pytest.raises(UnsortedEdgesError):
            base.cell_masses([0.5, 0.5])
        with pytest.raises(UnsortedEdgesError):
            base.cell_masses([])


class TestPosteriorUpdate:
    def test_displayed_formula(self):
        post = posterior_update(DPParams(1.0, UniformCDF(0, 1)), [0.2, 0.7, 0.7])
        assert post.concentration == 4.0
        np.testing.assert_allclose(post.base.weights, [0.25, 0.75], atol=1e-15)
        # quarter uniform mass + three quarters empirical mass at 0.5
        assert float(post.base.cdf_at(0.5)) == pytest.approx(0.25 * 0.5 + 0.75 / 3)

    def test_small_concentration_limit(self):
        post = posterior_update(DPParams(1e-9, UniformCDF(0, 1)), [0.1, 0.4, 0.9])
        assert post.base.weights[0] < 1e-9
        assert post.concentration == pytest.approx(3.0, abs=1e-8)

    def test_empty_data_rejected(self):
        with pytest.raises(EmptyDataError):
            posterior_update(DPParams(1.0, UniformCDF(0, 1)), [])

    def test_sequential_equals_batched(self):
        gen = np.random.default_rng(900)
        d1, d2 = gen.normal(size=25), gen.normal(size=35)
        prior = DPParams(0.5, GaussianCDF(0.0, 1.0))
        seq = posterior_update(posterior_update(prior, d1), d2)
        batch = posterior_update(prior, np.concatenate([d1, d2]))
        assert seq.concentration == batch.concentration
        probe = gen.uniform(-3, 3, size=100)
        np.testing.assert_allclose(
            np.asarray(seq.base.cdf_at(probe)), np.asarray(batch.base.cdf_at(probe)), atol=1e-12
        )


class TestFiniteMarginal:
    def test_empirical_base_concentration_vector(self):
        e = empirical_cdf([1.0, 2.0, 2.0])
        marginal = finite_marginal(DPParams(3.0, e), [1.5])
        np.testing.assert_allclose(marginal.concentration_vector, [1.0, 2.0], atol=1e-12)

    def test_uniform_base_symmetry(self):
        marginal = finite_marginal(DPParams(7.0, UniformCDF(0, 1)), [0.5])
        np.testing.assert_allclose(marginal.concentration_vector, [3.5, 3.5], atol=1e-12)

    def test_zero_mass_cell_rejected(self):
        with pytest.raises(ZeroMassCellError):
            finite_marginal(DPParams(1.0, UniformCDF(0, 1)), [0.5, 2.0])

    def test_returns_dirichlet_params(self):
        marginal = finite_marginal(DPParams(2.0, UniformCDF(0, 1)), [0.25, 0.5])
        assert isinstance(marginal, DirichletParams)
        assert marginal.concentration == 2.0


class TestStickBreaking:
    PARAMS = DPParams(5.0, UniformCDF(0.0, 1.0))

    def test_weights_account_for_all_mass(self):
        draw = sample_stick_breaking(self.PARAMS, 1e-8, rng_seed=4)
        assert draw.truncation_mass < 1e-8
        assert abs(draw.weights.sum() + draw.truncation_mass - 1.0) < 1e-12

    def test_fixed_seed_identical(self):
        a = sample_stick_breaking(self.PARAMS, 1e-6, rng_seed=11)
        b = sample_stick_breaking(self.PARAMS, 1e-6, rng_seed=11)
        np.testing.assert_array_equal(a.atoms, b.atoms)
        np.testing.assert_array_equal(a.weights, b.weights)

    def test_tiny_concentration_degenerates_to_one_atom(self):
        draw = sample_stick_breaking(DPParams(1e-6, UniformCDF(0, 1)), 1e-4, rng_seed=2)
        assert draw.weights[0] > 0.999

    def test_mean_cdf_matches_base(self):
        draws = [
            sample_stick_breaking(self.PARAMS, 1e-8, rng_seed=31, path=(d,))
            for d in range(2000)
        ]
        # F(t) ~ Beta(5t, 5(1-t)): mean t, variance t(1-t)/6.
        for t in np.linspace(0.05, 0.95, 10):
            values = np.asarray([d.cdf_at(t) for d in draws])
            se = np.sqrt(t * (1 - t) / 6.0 / len(draws))
            assert abs(values.mean() - t) < 3 * se

    def test_marginal_law_matches_finite_marginal(self):
        draws = 3000
        t = 0.3
        values = np.array(
            [
                sample_stick_breaking(self.PARAMS, 1e-8, rng_seed=77, path=(d,)).cdf_at(t)
                for d in range(draws)
            ]
        )
        marginal = finite_marginal(self.PARAMS, [t])
        a, b = marginal.concentration_vector
        stat = ks_one_sample_distance(values, lambda x: beta_dist.cdf(x, a, b))
        assert stat < ks_critical_value(draws, level=0.01)

    def test_truncation_tol_validated(self):
        with pytest.raises(ValueError):
            sample_stick_breaking(self.PARAMS, 0.5, rng_seed=1)


class TestBayesianBootstrapDraw:
    def test_symmetric_mean_weights(self):
        e = empirical_cdf([1.0, 2.0, 3.0, 4.0])
        weights = np.array(
            [bayesian_bootstrap_draw(e, 4, rng_seed=0, path=(d,)).weights for d in range(8000)]
        )
        np.testing.assert_allclose(weights.mean(axis=0), 0.25, atol=0.01)

    def test_tied_data_marginal(self):
        e = empirical_cdf([1.0, 2.0, 2.0])
        draws = np.array(
            [bayesian_bootstrap_draw(e, 3, rng_seed=5, path=(d,)).weights[0] for d in range(6000)]
        )
        # first-atom weight ~ Beta(1, 2)
        stat = ks_one_sample_distance(draws, lambda x: beta_dist.cdf(x, 1.0, 2.0))
        assert stat < ks_critical_value(draws.size, level=0.01)

    def test_no_truncation(self):
        e = empirical_cdf([1.0, 2.0])
        draw = bayesian_bootstrap_draw(e, 2, rng_seed=1)
        assert draw.truncation_mass == 0.0
        assert draw.weights.sum() == pytest.approx(1.0, abs=1e-15)

    def test_inconsistent_count_rejected(self):
        e = empirical_cdf([1.0, 2.0, 2.0])
        with pytest.raises(InconsistentCountError):
            bayesian_bootstrap_draw(e, 4, rng_seed=1)

    def test_matches_finite_marginal_concentration(self):
        # Singleton cells between the atoms reproduce the weight law exactly.
        data = [1.0, 2.0, 2.0, 5.0]
        e = empirical_cdf(data)
        params = DPParams(len(data), e)
        marginal = finite_marginal(params, [1.5, 3.0])
        counts = np.rint(e.masses * len(data))
        np.testing.assert_array_equal(marginal.concentration_vector, counts)


class TestDiscreteCDFDraw:
    def test_mass_accounting_validated(self):
        with pytest.raises(ValueError):
            DiscreteCDFDraw(np.array([1.0]), np.array([0.5]), truncation_mass=0.1)

    def test_cdf_renormalizes_truncation(self):
        draw = DiscreteCDFDraw(np.array([1.0, 2.0]), np.array([0.45, 0.45]), truncation_mass=0.1)
        assert draw.cdf_at(1.5) == pytest.approx(0.5)


class TestProcessBound:
    def test_uniform_certificate(self):
        rep = process_invariance_bound([0.5, 0.1, 0.01, 0.001], range(2, 51))
        assert rep.passed
        assert rep.bound_holds and rep.monotone_in_eps and rep.nonincreasing_in_p

    def test_small_eps_small_p_value(self):
        rep = process_invariance_bound([0.1], [2])
        assert rep.c_table[0, 0] == pytest.approx(0.0251, abs=1e-4)

    def test_halving_eps_at_least_halves_c(self):
        # rows are ascending in eps, so c at eps/2 sits one row above c at eps
        rep = process_invariance_bound([0.5, 0.25, 0.125, 0.0625], [2, 5])
        c = rep.c_table
        assert np.all(2 * c[:-1] <= c[1:] + 1e-12)

    def test_grid_validation(self):
        with pytest.raises(ValueError):
            process_invariance_bound([], [2])
        with pytest.raises(ValueError):
            process_invariance_bound([0.7], [2])
