"""Exception hierarchy.

Two families: :class:`ValidationError` for inputs outside an operation's
domain, and :class:`NumericalError` for computations that ran but cannot
be trusted. The CLI maps them to exit codes 3 and 4.
"""


class ThermoboundError(Exception):
    """Base class for all errors raised by the package."""


class ValidationError(ThermoboundError, ValueError):
    """Input outside the documented domain of an operation."""


class NonHermitianError(ValidationError):
    def __init__(self, max_asymmetry: float, tolerance: float):
        self.max_asymmetry = max_asymmetry
        self.tolerance = tolerance
        super().__init__(
            f"operator is not Hermitian: max|H - H^dagger| = {max_asymmetry:.3e} "
            f"exceeds tolerance {tolerance:.3e}"
        )


class DimensionMismatchError(ValidationError):
    pass


class NumericalError(ThermoboundError, ArithmeticError):
    """A computation finished but its result is numerically untrustworthy."""


class SpectralError(NumericalError):
    """Eigensolver failure."""


class NumericalConsistencyError(NumericalError):
    """Two routes to the same quantity disagree beyond tolerance."""


class NumericalDegeneracyError(NumericalError):
    """A closed form hit an ill-conditioned or non-positive denominator."""


class IntegrationError(NumericalError):
    """ODE integration failed (step underflow, invariant drift, bad profile)."""


class TruncationError(NumericalError):
    """Truncated basis too small for the requested temperature."""
