"""
Circuit exceptions for qbench.
"""


class CircuitError(ValueError):
    """Raised when a gate or circuit violates a structural invariant."""
