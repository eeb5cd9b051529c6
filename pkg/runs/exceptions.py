"""
Run exceptions for qbench.
"""


class SchemaError(ValueError):
    """Raised when a counts document violates the counts schema or its case."""


class AppendOnlyError(ValueError):
    """Raised on an attempt to change a stored run record."""
