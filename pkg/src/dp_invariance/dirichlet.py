"""Dirichlet distribution in the (concentration, mean) parametrization.

``DirichletParams(concentration, mean)`` is the pair (a, F0) with
concentration vector a * F0. The normalizing constant

    C = Gamma(a) / prod_i Gamma(a * F0_i)

is the quantity whose decay as a -> 0 certifies approximate scale
invariance; ``eps_invariance_margin`` packages it with the envelope
factors used by the stability check. Sampling survives tiny shape
parameters (a * F0_i << 1) via a log-space construction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy.special import gammaln

from . import rng as rngmod
from .density import ENVELOPE_FACTOR, ENVELOPE_FACTOR_LOOSE
from .errors import (
    BoundaryPointError,
    DimensionMismatchError,
    ZeroMeanComponentError,
)
from .simplex import INTERIOR_MIN, ProbVector

# Below this smallest shape parameter, gamma draws are built in log space
# to avoid exact zeros from underflow.
_SMALL_SHAPE = 0.1

_TINY_WEIGHT = np.nextafter(0.0, 1.0)  # smallest positive double


@dataclass(frozen=True)
class DirichletParams:
    """Concentration > 0 plus a mean probability vector."""

    concentration: float
    mean: ProbVector

    def __post_init__(self):
        c = float(self.concentration)
        if not (c > 0) or not math.isfinite(c):
            raise ValueError("concentration must be a positive finite real")
        object.__setattr__(self, "concentration", c)

    @property
    def dim(self) -> int:
        return self.mean.dim

    @property
    def concentration_vector(self) -> np.ndarray:
        return self.concentration * self.mean.weights

    @classmethod
    def from_concentration_vector(cls, alpha) -> "DirichletParams":
        arr = np.asarray(alpha, dtype=np.float64)
        if np.any(arr <= 0):
            raise ValueError("concentration vector must be strictly positive")
        total = float(arr.sum())
        return cls(total, ProbVector(arr / total))


def log_c_eps(params: DirichletParams) -> float:
    """Log normalizing constant: lgamma(a) - sum_i lgamma(a * F0_i)."""
    shapes = params.concentration_vector
    if np.any(params.mean.weights <= 0):
        raise ZeroMeanComponentError("mean components must be strictly positive")
    return float(gammaln(params.concentration) - gammaln(shapes).sum())


def log_pdf(params: DirichletParams, theta: ProbVector) -> float:
    """Log density at an interior point of the simplex."""
    if theta.dim != params.dim:
        raise DimensionMismatchError(f"dimension mismatch: {params.dim} != {theta.dim}")
    if not theta.is_interior(INTERIOR_MIN):
        raise BoundaryPointError("log_pdf requires an interior point")
    shapes = params.concentration_vector
    return float(log_c_eps(params) + ((shapes - 1.0) @ np.log(theta.weights)))


class DirichletSample(NamedTuple):
    """Sampled simplex points, one per row, plus the underflow-clamp count."""

    points: np.ndarray
    clamp_count: int


def sample(params: DirichletParams, rng_seed: int, draws: int) -> DirichletSample:
    """Draw simplex points; deterministic given (seed, draw index).

    The standard gamma-ratio construction is used when every shape
    parameter is at least 0.1. Below that, gamma variates are formed in
    log space (boosted shape plus log-uniform correction) and normalized
    by row maximum, so draws stay strictly positive where floating point
    allows; entries that still underflow are clamped to the smallest
    positive double and counted in ``clamp_count``.
    """
    if draws < 1:
        raise ValueError("draws must be >= 1")
    shapes = params.concentration_vector
    if np.any(shapes <= 0):
        raise ZeroMeanComponentError("mean components must be strictly positive")
    p = params.dim
    small = bool(shapes.min() < _SMALL_SHAPE)

    points = np.empty((draws, p))
    clamps = 0

    def fill(chunk: tuple[int, int, int]) -> int:
        c, start, stop = chunk
        gen = rngmod.substream(rng_seed, c)
        k = stop - start
        if small:
            boosted = gen.standard_gamma(shapes + 1.0, size=(k, p))
            u = gen.random((k, p))
            u = np.maximum(u, _TINY_WEIGHT)
            log_g = np.log(boosted) + np.log(u) / shapes
            w = np.exp(log_g - log_g.max(axis=1, keepdims=True))
        else:
            w = gen.standard_gamma(shapes, size=(k, p))
        clamped = int((w <= 0).sum())
        if clamped:
            w = np.maximum(w, _TINY_WEIGHT)
        points[start:stop] = w / w.sum(axis=1, keepdims=True)
        return clamped

    for n in rngmod.parallel_map(fill, rngmod.chunk_ranges(draws, p)):
        clamps += n
    return DirichletSample(points=points, clamp_count=clamps)


@dataclass(frozen=True)
class EpsInvarianceMargin:
    """Normalizing constant and the margins built from it.

    ``delta_criterion`` is the certification threshold itself (a delta
    must exceed c_eps); ``sup_margin`` multiplies in the loose exp(e)
    factor, ``sup_margin_stability`` the exp(1/e) envelope factor. Both
    use the fact that |prod theta_i^(a F0_i) - 1| <= 1 on the simplex,
    so the supremum side of the bound is exact, and neither depends on
    theta.
    """

    c_eps: float
    sup_margin: float
    sup_margin_stability: float

    @property
    def delta_criterion(self) -> float:
        return self.c_eps


def eps_invariance_margin(params: DirichletParams) -> EpsInvarianceMargin:
    """Margin record certifying approximate invariance for these params."""
    c = math.exp(log_c_eps(params))
    return EpsInvarianceMargin(
        c_eps=c,
        sup_margin=c * ENVELOPE_FACTOR_LOOSE,
        sup_margin_stability=c * ENVELOPE_FACTOR,
    )


def dirichlet_log_density(params: DirichletParams):
    """The log-pdf as a GeneralizedDensity-compatible rule."""

    def rule(theta: ProbVector) -> float:
        return log_pdf(params, theta)

    return rule
