"""Exception types shared across the package."""


class SmallTimeError(Exception):
    """Base class for all package errors."""


class QuadratureDivergence(SmallTimeError):
    """Adaptive quadrature could not certify the requested absolute tolerance.

    Usually signals a non-integrable integrand or a tolerance that is too
    tight for the subdivision budget.
    """


class DomainError(SmallTimeError):
    """Argument outside the mathematical domain of the operation."""


class InvariantViolation(SmallTimeError):
    """A declared object fails one of its construction invariants."""


class DimensionMismatch(SmallTimeError):
    """Inconsistent dimensions between characteristics, functions and points."""


class DegenerateGradient(SmallTimeError):
    """The projection direction has zero partial derivative at the base point."""


class RegimeUnknown(SmallTimeError):
    """No asymptotic formula is available for this at-the-money configuration."""


class ConfigError(SmallTimeError):
    """Simulation scheme and jump structure are incompatible."""


class CutoffTooCoarse(SmallTimeError):
    """Discarded small-jump variance exceeds the allowed share of the total."""


class InsufficientSignal(SmallTimeError):
    """Too many Monte Carlo estimates are statistically indistinguishable from zero."""


class SpecError(SmallTimeError):
    """Model-spec file fails schema validation."""
