"""Evaporation-front moving boundary problem: fixed-domain simulator and linear analysis."""

from .errors import (BranchCutError, ConvergenceError, DegenerateMapError, EvapFrontError,
                     MarginViolation, NumericalError, SnapshotMismatch, SolverBreakdown,
                     ValidationError, WellposednessHalt)
from .fields import FieldState, Params
from .geometry import Grid, InterfaceState, build_diffeomorphism, build_grid

__version__ = "0.1.0"

__all__ = [
    "BranchCutError", "ConvergenceError", "DegenerateMapError", "EvapFrontError", "MarginViolation",
    "NumericalError", "SnapshotMismatch", "SolverBreakdown", "ValidationError", "WellposednessHalt",
    "FieldState", "Params", "Grid", "InterfaceState", "build_diffeomorphism", "build_grid",
]
