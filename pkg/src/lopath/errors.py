"""Exception types shared across the package."""


class LopathError(Exception):
    """Base class for all package errors."""


class ShapeError(LopathError, ValueError):
    """Raised on mismatched dimensions, mode counts or photon totals."""


class CompositionError(LopathError, ValueError):
    """Raised when two diagrams cannot be composed."""


class DomainError(LopathError, ValueError):
    """Raised when an argument lies outside the accepted domain."""


class SizeLimitError(LopathError):
    """Raised when a computation would exceed a configured size limit."""
