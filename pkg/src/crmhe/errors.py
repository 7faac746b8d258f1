"""Exception hierarchy shared across the package."""


class CRMHEError(Exception):
    """Base class for all errors raised by :mod:`crmhe`."""


class InvalidParameterError(CRMHEError, ValueError):
    """A distribution, entropy order or configuration value is out of range."""


class DomainError(CRMHEError, ValueError):
    """A quantity was requested where it is undefined (zero survival, infinite mean...)."""


class DivergentEntropy(CRMHEError, ArithmeticError):
    """The survival integral defining the entropy does not converge."""


class DegenerateSample(CRMHEError, ValueError):
    """The sample has zero spread, so no data-driven bandwidth exists."""


class TruncationBeyondSupport(CRMHEError, ValueError):
    """Estimated survival at the truncation time is numerically zero."""


class FitError(CRMHEError, RuntimeError):
    """Maximum likelihood fitting failed."""
