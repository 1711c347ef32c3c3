"""Exception types for contract violations.

Every error subclasses both :class:`DPInvarianceError` and ``ValueError``,
so callers may catch the package base class or stay generic.
"""


class DPInvarianceError(ValueError):
    """Base class for all errors raised by this package."""


class EmptyOrSingletonError(DPInvarianceError):
    """A probability vector needs at least two components."""


class NegativeEntryError(DPInvarianceError):
    """Weights and scales must be non-negative / strictly positive."""


class ZeroSumError(DPInvarianceError):
    """Cannot normalize a vector whose entries sum to zero."""


class DimensionMismatchError(DPInvarianceError):
    """Operands live on simplices of different dimension."""


class BoundaryPointError(DPInvarianceError):
    """Operation requires an interior simplex point."""


class NonFiniteError(DPInvarianceError):
    """A computation produced a non-finite intermediate."""


class NonPositiveDeltaError(DPInvarianceError):
    """Stability bounds require delta > 0."""


class ZeroMeanComponentError(DPInvarianceError):
    """A zero mean component makes the normalizing constant undefined."""


class EmptyDataError(DPInvarianceError):
    """Observed data must be nonempty."""


class ZeroMassCellError(DPInvarianceError):
    """Every partition cell must carry strictly positive base mass."""


class UnsortedEdgesError(DPInvarianceError):
    """Partition edges must be strictly increasing."""


class InconsistentCountError(DPInvarianceError):
    """Sample size does not match the empirical CDF's atom masses."""


class EmptyDrawError(DPInvarianceError):
    """A discrete CDF draw with no atoms cannot be summarized."""


class InsufficientDrawsError(DPInvarianceError):
    """Too few posterior draws requested for a stable summary."""


class EmptyArmError(DPInvarianceError):
    """Both arms of a two-arm analysis need observations."""


class TooFewObservationsError(DPInvarianceError):
    """The bootstrap comparison needs a minimum sample size."""
