"""KS helpers cross-validated against scipy."""

import numpy as np
import pytest
from scipy import stats
from scipy.special import kolmogi

from dp_invariance.kstats import (
    ks_critical_value,
    ks_one_sample_distance,
    ks_two_sample_distance,
)


def test_two_sample_distance_matches_scipy():
    gen = np.random.default_rng(0)
    x = gen.normal(size=400)
    y = gen.normal(0.2, 1.1, size=333)
    ours = ks_two_sample_distance(x, y)
    ref = stats.ks_2samp(x, y, method="asymp").statistic
    assert ours == pytest.approx(ref, abs=1e-12)


def test_two_sample_identical_lists_zero():
    x = np.arange(50.0)
    assert ks_two_sample_distance(x, x) == 0.0


def test_one_sample_distance_matches_scipy():
    gen = np.random.default_rng(3)
    x = gen.normal(size=500)
    ours = ks_one_sample_distance(x, stats.norm.cdf)
    ref = stats.kstest(x, stats.norm.cdf).statistic
    assert ours == pytest.approx(ref, abs=1e-12)


def test_critical_value_matches_kolmogorov_quantile():
    level = 0.01
    n = 10_000
    exact = kolmogi(level) / np.sqrt(n)
    assert ks_critical_value(n, level=level) == pytest.approx(exact, rel=1e-6)


def test_two_sample_critical_value_scaling():
    c1 = ks_critical_value(100, 100, level=0.05)
    c2 = ks_critical_value(400, 400, level=0.05)
    assert c1 == pytest.approx(2 * c2, rel=1e-12)


def test_critical_value_rejects_levels():
    with pytest.raises(ValueError):
        ks_critical_value(10, level=0.0)
