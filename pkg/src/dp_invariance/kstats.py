"""Kolmogorov–Smirnov distances and asymptotic critical values.

Plain numpy implementations so check thresholds are explicit; scipy is
used only in the test suite to cross-validate these.
"""

from __future__ import annotations

import math

import numpy as np


def ks_two_sample_distance(x, y) -> float:
    """sup |F_x - F_y| over the pooled sample points."""
    x = np.sort(np.asarray(x, dtype=np.float64))
    y = np.sort(np.asarray(y, dtype=np.float64))
    if x.size == 0 or y.size == 0:
        raise ValueError("both samples must be nonempty")
    pooled = np.concatenate([x, y])
    cdf_x = np.searchsorted(x, pooled, side="right") / x.size
    cdf_y = np.searchsorted(y, pooled, side="right") / y.size
    return float(np.abs(cdf_x - cdf_y).max())


def ks_one_sample_distance(x, cdf) -> float:
    """sup |F_n - F| for a continuous reference CDF callable."""
    x = np.sort(np.asarray(x, dtype=np.float64))
    n = x.size
    if n == 0:
        raise ValueError("sample must be nonempty")
    f = np.asarray(cdf(x), dtype=np.float64)
    lower = f - np.arange(0, n) / n
    upper = np.arange(1, n + 1) / n - f
    return float(np.maximum(lower, upper).max())


def ks_critical_value(n: int, m: int | None = None, level: float = 0.01) -> float:
    """Asymptotic KS critical value at the given significance level.

    One-sample when m is None, two-sample otherwise:
    c(level) = sqrt(-ln(level / 2) / 2), scaled by the effective sample
    size.
    """
    if not (0 < level < 1):
        raise ValueError("level must be in (0, 1)")
    c = math.sqrt(-0.5 * math.log(level / 2.0))
    if m is None:
        return c / math.sqrt(n)
    return c * math.sqrt((n + m) / (n * m))
