"""
Exception hierarchy for Graph Blowup Lab.

Every error raised on purpose by the lab derives from LabError and carries
the process exit code the CLI reports for it.
"""


class LabError(Exception):
    """Base class for all lab errors."""

    exit_code: int = 1


class DomainError(LabError, ValueError):
    """Argument outside the domain of an operation (unknown vertex, p <= 1, ...)."""


class CapacityError(LabError):
    """A resource guard was hit (e.g. too many lattice vertices)."""


class RangeError(LabError, ValueError):
    """A radius or window reaches beyond the trusted truncation."""


class InsufficientDataError(LabError, ValueError):
    """Not enough usable points for a fit or a report."""


class NumericError(LabError, ArithmeticError):
    """Non-finite values appeared during a computation."""

    exit_code = 3


class CoverageError(LabError):
    """A trajectory does not cover the time window a functional needs."""


class ConfigError(LabError, ValueError):
    """Invalid experiment configuration."""

    exit_code = 2


class NoPredictionError(LabError):
    """Parameters lie outside the region where a lifespan law is known."""


class TruncationError(LabError):
    """A run stayed truncation-contaminated after its retry."""

    exit_code = 4
