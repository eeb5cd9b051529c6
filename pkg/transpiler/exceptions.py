"""
Transpiler exceptions for qbench.
"""


class UnroutableError(ValueError):
    """Raised when a CX cannot be brought onto a legal coupling pair."""


class VerificationError(ValueError):
    """Raised when a rewrite does not reproduce the unitary it replaces."""
