"""Numpy implementations of the hot draw kernels.

Selected at import time when the compiled extension is unavailable (or
forced via ``DP_INVARIANCE_BACKEND=python``). Both backends consume the
same bit-generator stream value for value, so they produce the same
draws up to floating-point summation order.
"""

from __future__ import annotations

import numpy as np


def exp_ratio_draws(bit_gen, values: np.ndarray, n_draws: int) -> np.ndarray:
    """Per draw: e_j ~ Exp(1), return sum(e*values)/sum(e).

    This is the law of ``dot(w, values)`` with w ~ Dirichlet(1, .., 1)
    over len(values) observations. Consumes n_draws * len(values)
    standard exponentials, draw-major.
    """
    gen = np.random.Generator(bit_gen)
    e = gen.standard_exponential((int(n_draws), values.shape[0]))
    return (e @ values) / e.sum(axis=1)


def exp_quantile_draws(bit_gen, sorted_values: np.ndarray, q: float, n_draws: int) -> np.ndarray:
    """Per draw: smallest value whose cumulative Exp(1) weight reaches q.

    ``sorted_values`` must be ascending. Stream consumption matches
    exp_ratio_draws exactly.
    """
    gen = np.random.Generator(bit_gen)
    e = gen.standard_exponential((int(n_draws), sorted_values.shape[0]))
    cum = np.cumsum(e, axis=1)
    targets = q * cum[:, -1]
    idx = (cum >= targets[:, None]).argmax(axis=1)
    return sorted_values[idx]
