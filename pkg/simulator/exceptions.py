"""
Simulator exceptions for qbench.
"""


class SimulationError(ValueError):
    """Raised when a circuit cannot be executed as requested."""
