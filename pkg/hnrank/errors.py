"""Exception hierarchy for HNRank.

Every error carries the process exit code the CLI reports for it:
0 success, 2 usage/config error, 3 data validation error, 4 convergence failure.
"""

from typing import List, Optional

import numpy as np


class HnrankError(Exception):
    """Base class for all HNRank errors."""

    exit_code: int = 1


class ConfigError(HnrankError):
    """Invalid configuration or command usage."""

    exit_code = 2


class DataValidationError(HnrankError):
    """Input data violates a documented format or invariant."""

    exit_code = 3

    def __init__(self, message: str, diagnostics: Optional[List[str]] = None):
        self.summary = message
        self.diagnostics = list(diagnostics or [])
        if self.diagnostics:
            message = message + "\n  " + "\n  ".join(self.diagnostics)
        super().__init__(message)


class InsufficientNeighborhoodError(DataValidationError):
    """Expected Force is undefined for the requested seed node."""


class UndefinedCorrelationError(DataValidationError):
    """A rank correlation was requested on a constant vector."""


class ConvergenceError(HnrankError):
    """Fixed-point iteration did not reach the tolerance."""

    exit_code = 4

    def __init__(
        self,
        message: str,
        partial: Optional[np.ndarray] = None,
        residual: float = float("nan"),
        iterations: int = 0,
        sample_index: Optional[int] = None,
    ):
        super().__init__(message)
        self.partial = partial
        self.residual = residual
        self.iterations = iterations
        self.sample_index = sample_index
