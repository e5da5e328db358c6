"""Exception types shared across the package."""

__all__ = [
    "ContractViolationError",
    "SingularStatisticsError",
    "UndefinedBoundError",
    "PulseFormatError",
]


class ContractViolationError(ValueError):
    """An input violated a numerical contract (e.g. Hermiticity, trace)."""


class SingularStatisticsError(ValueError):
    """An outcome probability vanished while its parameter derivative did not."""


class UndefinedBoundError(ValueError):
    """A Cramer-Rao bound was requested for nonpositive Fisher information."""


class PulseFormatError(ValueError):
    """A pulse file does not match the expected layout."""
