"""
Exception hierarchy for the laboratory.

Every error raised on purpose by the package derives from LabError so callers
(the CLI in particular) can separate expected failures from programming errors.
"""

from typing import Any, Dict, Optional, Tuple


class LabError(Exception):
    """Base class for all laboratory errors."""

    def __init__(self, message: str, details: Optional[Dict[str, Any]] = None):
        """
        Initialize the error.

        Args:
            message: Human readable description
            details: Structured context, merged into log records by the CLI
        """
        self.message = message
        self.details = details or {}
        super().__init__(self.message)


class ConfigurationError(LabError, ValueError):
    """Raised for invalid map, measure, grid or experiment parameters."""


class UnsupportedOperationError(LabError):
    """Raised when an operation is not defined for a map (e.g. inverting the doubling map)."""


class MeasureError(LabError, ValueError):
    """Raised for malformed measures: negative or unnormalized weights, mismatched spaces, empty sets."""


class SolverError(LabError):
    """Raised when a linear program does not terminate with an optimal solution."""


class ConvergenceError(LabError):
    """Raised when an iterative stationary-distribution solve exhausts its budget."""

    def __init__(self, message: str, residual: float, iterations: int):
        super().__init__(message, {"residual": residual, "iterations": iterations})
        self.residual = residual
        self.iterations = iterations


class LipschitzViolationError(ConfigurationError):
    """Raised when a function declared L-Lipschitz has a larger difference quotient."""

    def __init__(self, message: str, pair: Tuple[float, float], ratio: float, declared: float):
        super().__init__(message, {"pair": pair, "ratio": ratio, "declared": declared})
        self.pair = pair
        self.ratio = ratio
        self.declared = declared
