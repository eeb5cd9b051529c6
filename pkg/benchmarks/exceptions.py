"""
Benchmark exceptions for qbench.
"""


class BenchmarkError(ValueError):
    """Raised when benchmark parameters do not describe a valid case."""


class DescriptorError(BenchmarkError):
    """Raised when an identity-sequence descriptor is malformed or not an identity."""
