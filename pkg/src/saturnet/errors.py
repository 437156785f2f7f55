"""Exception hierarchy shared across the package."""

from __future__ import annotations


class SaturnetError(Exception):
    """Base class for all errors raised by this package."""


class InputError(SaturnetError):
    """Invalid argument or data: bad shapes, violated invariants, out-of-range values."""


class FileFormatError(SaturnetError):
    """An input file does not have the expected structure."""


class NonConvergenceError(SaturnetError):
    """Fixed-point iteration exhausted its budget without converging.

    Carries the last iterate so callers can inspect or resume.
    """

    def __init__(self, message: str, last_iterate=None, iterations: int = 0):
        super().__init__(message)
        self.last_iterate = last_iterate
        self.iterations = iterations


class PartitionInconsistencyError(SaturnetError):
    """An exact re-solve contradicted the node classification it was based on.

    Usually means the input point was too far from an equilibrium for the
    classification tolerance in use.
    """

    def __init__(self, message: str, candidate=None, residual: float | None = None):
        super().__init__(message)
        self.candidate = candidate
        self.residual = residual


class NotCriticalError(SaturnetError):
    """A jump quantity was requested at a flow where the equilibrium is unique."""
