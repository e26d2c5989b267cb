"""Exception types shared across the package."""

from .scalar import DegenerateRootError, TowerMismatchError


class TruncationDeficit(ValueError):
    """A coefficient beyond the guaranteed precision was requested."""

    def __init__(self, message: str, needed=None, available=None):
        super().__init__(message)
        self.needed = needed
        self.available = available


class SingularJacobianError(ValueError):
    pass


class PreconditionError(ValueError):
    pass


class DegeneracyError(ValueError):
    """A zero of dx is not simple, or some other genericity assumption fails."""


class AdmissibilityError(ValueError):
    """dy does not satisfy the conditions needed by an operation."""


class NonSemisimpleError(ValueError):
    pass


class InternalConsistencyError(RuntimeError):
    pass


__all__ = [
    "TruncationDeficit", "SingularJacobianError", "PreconditionError",
    "DegeneracyError", "AdmissibilityError", "NonSemisimpleError",
    "InternalConsistencyError", "DegenerateRootError", "TowerMismatchError",
]
