"""Exception hierarchy.

Every error carries an ``exit_code`` so the command line front end can map
failures onto its documented process exit codes without a lookup table.
"""

from __future__ import annotations


class EvapFrontError(Exception):
    exit_code = 1


class ValidationError(EvapFrontError, ValueError):
    """Bad input: parameters, grids, configs, preconditions."""

    exit_code = 2


class NumericalError(EvapFrontError, ArithmeticError):
    """A solver or root finder could not deliver a trustworthy answer."""

    exit_code = 3


class DegenerateMapError(NumericalError):
    """The fixed-domain map lost positivity of its Jacobian."""


class SolverBreakdown(NumericalError):
    def __init__(self, message: str, residual: float | None = None):
        super().__init__(message)
        self.residual = residual


class BranchCutError(NumericalError):
    """A principal square root was requested exactly on its branch cut."""


class ConvergenceError(NumericalError):
    def __init__(self, message: str, last_iterate: complex | None = None):
        super().__init__(message)
        self.last_iterate = last_iterate


class MarginViolation(EvapFrontError):
    """The interface left the admissible band inside the layer."""

    exit_code = 4


class WellposednessHalt(EvapFrontError):
    """Raised only when halting on a violated well-posedness margin is enabled."""

    exit_code = 4


class SnapshotMismatch(ValidationError):
    """Snapshot was written under a different configuration."""
