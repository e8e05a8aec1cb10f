"""Exception types shared across the solver modules."""
from __future__ import annotations


class SolverError(Exception):
    """Base class for solver failures."""


class StaticFieldError(SolverError):
    """Raised when a stable time step is undefined because no wave moves."""


class RiemannError(SolverError):
    """Raised when a Riemann star-state iteration fails to converge."""


class VacuumError(RiemannError):
    """Raised when Riemann data would generate vacuum (ideal gas only)."""


class PositivityError(SolverError):
    """Raised when a scheme produces non-positive density or internal energy.

    Carries enough context to report the offending step instead of silently
    clamping the state.
    """

    def __init__(self, message: str, *, step_index: int | None = None,
                 cell: int | None = None, value: float | None = None):
        super().__init__(message)
        self.step_index = step_index
        self.cell = cell
        self.value = value


class UsageError(SolverError):
    """Raised for invalid user-facing configuration (CLI exit code 1)."""
