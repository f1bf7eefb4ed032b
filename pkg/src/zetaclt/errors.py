"""Exception types raised across the package."""


class ZetaCLTError(Exception):
    """Base class for all package errors."""


class DomainError(ZetaCLTError, ValueError):
    """Argument outside the domain of an operation."""


class CapacityError(ZetaCLTError):
    """Request exceeds a memory or size budget."""


class PrecisionError(ZetaCLTError):
    """A requested accuracy cannot be reached with the configured truncations."""


class QualityError(ZetaCLTError):
    """A computed result failed its own quality gate (e.g. too many exclusions)."""


class BranchError(ZetaCLTError):
    """The logarithm branch could not be tracked reliably.

    ``t`` carries the ordinate of the failing sample when known.
    """

    def __init__(self, message: str, t: float | None = None):
        super().__init__(message)
        self.t = t


class OrderError(DomainError):
    """Interval endpoints given in the wrong order."""


class RangeError(ZetaCLTError, OverflowError):
    """Result overflows double precision."""


class PoleError(DomainError):
    """Evaluation requested at a pole."""
