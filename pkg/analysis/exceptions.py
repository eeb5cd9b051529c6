"""
Analysis exceptions for qbench.
"""

from typing import TYPE_CHECKING, Optional

if TYPE_CHECKING:
    from .models import PureStateFit


class AnalysisError(ValueError):
    """Raised when counts or datasets cannot be analysed as requested."""


class FitError(AnalysisError):
    """Raised when no optimizer start converged; ``best`` holds the lowest-residual attempt."""

    def __init__(self, message: str, best: Optional['PureStateFit'] = None) -> None:
        super().__init__(message)
        self.best = best
