"""Probability simplex points and the rescale-renormalize group.

The group acts on a p-dimensional probability vector by scaling each
component with a positive constant and renormalizing:

    (theta_1, .., theta_p) -> (c_1 theta_1, .., c_p theta_p) / sum_i c_i theta_i

Scale vectors are equivalence classes (c and k*c act identically for any
k > 0); the canonical representative sums to one. The density ratio
induced by an element on the simplex is prod(c) / (sum c*theta)^p, which
this module provides in log space along with an independent
finite-difference check of the same quantity.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    BoundaryPointError,
    DimensionMismatchError,
    EmptyOrSingletonError,
    NegativeEntryError,
    NonFiniteError,
    ZeroSumError,
)

# Density-level operations reject points this close to the boundary:
# the reference density 1/prod(theta) and the log group ratio are not
# finite there.
INTERIOR_MIN = 1e-300


def _as_float_vector(values, what: str) -> np.ndarray:
    arr = np.asarray(values, dtype=np.float64)
    if arr.ndim != 1:
        raise ValueError(f"{what} must be one-dimensional")
    return arr


@dataclass(frozen=True)
class ProbVector:
    """A point on the probability simplex: non-negative weights summing to 1."""

    weights: np.ndarray

    def __post_init__(self):
        arr = _as_float_vector(self.weights, "weights")
        if arr.shape[0] < 2:
            raise EmptyOrSingletonError("a probability vector needs dimension >= 2")
        if np.any(arr < 0):
            raise NegativeEntryError("weights must be non-negative")
        total = float(arr.sum())
        if not np.isfinite(total) or abs(total - 1.0) > 1e-12:
            raise ZeroSumError(f"weights must sum to 1 within 1e-12, got {total!r}")
        arr = arr.copy()
        arr.setflags(write=False)
        object.__setattr__(self, "weights", arr)

    @property
    def dim(self) -> int:
        return self.weights.shape[0]

    def is_interior(self, min_weight: float = INTERIOR_MIN) -> bool:
        return bool(np.all(self.weights >= min_weight))


@dataclass(frozen=True)
class GroupElement:
    """Equivalence class of positive scale vectors, stored canonically.

    Two scale vectors that are positive multiples of each other are the
    same element; the canonical representative sums to one, so class
    equality is plain vector comparison.
    """

    scales: np.ndarray

    def __post_init__(self):
        arr = _as_float_vector(self.scales, "scales")
        if arr.shape[0] < 2:
            raise EmptyOrSingletonError("a group element needs dimension >= 2")
        if np.any(arr <= 0):
            raise NegativeEntryError("scales must be strictly positive")
        total = float(arr.sum())
        if not np.isfinite(total):
            raise NonFiniteError("scales must be finite")
        arr = arr / total
        arr.setflags(write=False)
        object.__setattr__(self, "scales", arr)

    @property
    def dim(self) -> int:
        return self.scales.shape[0]


def make_prob_vector(values) -> ProbVector:
    """Normalize non-negative values into a ProbVector.

    Raises EmptyOrSingletonError, NegativeEntryError or ZeroSumError when
    the input cannot represent a simplex point.
    """
    arr = _as_float_vector(values, "values")
    if arr.shape[0] < 2:
        raise EmptyOrSingletonError("need at least two values")
    if np.any(arr < 0):
        raise NegativeEntryError("values must be non-negative")
    total = float(arr.sum())
    if total <= 0:
        raise ZeroSumError("values must have a positive sum")
    return ProbVector(arr / total)


def make_group_element(scales) -> GroupElement:
    """Canonical group element for a vector of positive scales."""
    return GroupElement(np.asarray(scales, dtype=np.float64))


def identity_element(dim: int) -> GroupElement:
    """The identity class: equal scales."""
    return GroupElement(np.full(dim, 1.0 / dim))


def _check_dims(a_dim: int, b_dim: int) -> None:
    if a_dim != b_dim:
        raise DimensionMismatchError(f"dimension mismatch: {a_dim} != {b_dim}")


def apply(g: GroupElement, theta: ProbVector) -> ProbVector:
    """Act on a simplex point: scale componentwise and renormalize."""
    _check_dims(g.dim, theta.dim)
    scaled = g.scales * theta.weights
    total = float(scaled.sum())
    if total <= 0 or not np.isfinite(total):
        raise BoundaryPointError("scaled point has no positive mass to renormalize")
    return ProbVector(scaled / total)


def compose(g1: GroupElement, g2: GroupElement) -> GroupElement:
    """Group composition: componentwise product of scales, canonicalized.

    apply(compose(g1, g2), theta) == apply(g1, apply(g2, theta)).
    """
    _check_dims(g1.dim, g2.dim)
    return GroupElement(g1.scales * g2.scales)


def inverse(g: GroupElement) -> GroupElement:
    """The inverse class: reciprocal scales."""
    return GroupElement(1.0 / g.scales)


def log_rn_derivative(g: GroupElement, theta: ProbVector) -> float:
    """Log density ratio of the group action at theta.

    Equals sum(log c_i) - p * log(sum c_i theta_i); invariant under the
    choice of class representative. Finite only for interior points.
    """
    _check_dims(g.dim, theta.dim)
    if not theta.is_interior():
        raise BoundaryPointError("log density ratio requires an interior point")
    denom = float(g.scales @ theta.weights)
    value = float(np.log(g.scales).sum() - theta.dim * np.log(denom))
    if not np.isfinite(value):
        raise BoundaryPointError("log density ratio is not finite at this point")
    return value


def _chart_map(g: GroupElement, x: np.ndarray) -> np.ndarray:
    """Group action expressed on the chart (theta_1, .., theta_{p-1})."""
    theta = np.append(x, 1.0 - x.sum())
    scaled = g.scales * theta
    return scaled[:-1] / scaled.sum()


def numerical_log_jacobian(g: GroupElement, theta: ProbVector, step: float = 1e-5) -> float:
    """Central-difference log |det| of the action on the last-coordinate chart.

    Independent numerical counterpart of log_rn_derivative: the simplex
    is charted by its first p-1 coordinates and the Jacobian of the
    chart-to-chart map is differenced with the given step.
    """
    _check_dims(g.dim, theta.dim)
    if not (0.0 < step <= 1e-3):
        raise ValueError("step must be in (0, 1e-3]")
    if np.any(theta.weights < 10.0 * step):
        raise BoundaryPointError("point too close to the boundary for this step")
    x = theta.weights[:-1].copy()
    k = x.shape[0]
    jac = np.empty((k, k))
    for j in range(k):
        bump = np.zeros(k)
        bump[j] = step
        jac[:, j] = (_chart_map(g, x + bump) - _chart_map(g, x - bump)) / (2.0 * step)
    sign, logdet = np.linalg.slogdet(jac)
    if sign <= 0 or not np.isfinite(logdet):
        raise NonFiniteError("finite-difference Jacobian is singular or non-finite")
    return float(logdet)


def sample_interior_point(
    gen: np.random.Generator, dim: int, min_weight: float = 1e-4
) -> ProbVector:
    """Uniform (flat Dirichlet) draw from the simplex, resampled until all
    weights clear ``min_weight``."""
    while True:
        raw = gen.dirichlet(np.ones(dim))
        if raw.min() >= min_weight:
            return ProbVector(raw / raw.sum())


def sample_group_element(
    gen: np.random.Generator, dim: int, log_scale_range: float = 2.0
) -> GroupElement:
    """Random element with scales log-uniform on [e^-r, e^r]."""
    return GroupElement(np.exp(gen.uniform(-log_scale_range, log_scale_range, size=dim)))
