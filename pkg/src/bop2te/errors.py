"""Exception types shared across the package."""


class Bop2teError(Exception):
    """Base class for all package errors."""


class ValidationError(Bop2teError):
    """Invalid domain input; carries the offending field name."""

    def __init__(self, field: str, message: str):
        self.field = field
        self.message = message
        super().__init__(f"{field}: {message}")


class SizeLimitError(Bop2teError):
    """Input exceeds a guard that keeps exhaustive computation tractable."""


class NotFoundError(Bop2teError):
    """A referenced document or job does not exist."""


class ConflictError(Bop2teError):
    """A write would violate an ordering or linkage invariant."""


class MissingResultError(Bop2teError):
    """The requested output needs an optimization result that is absent."""
