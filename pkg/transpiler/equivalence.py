"""
Unitary comparison up to a global phase.
"""

import numpy as np

from .models import Layout


def permute_rows(layout: Layout, matrix: np.ndarray) -> np.ndarray:
    """Return ``P(layout) @ matrix`` without forming P."""
    result = np.empty_like(matrix)
    result[layout.basis_permutation()] = matrix
    return result


def aligned_distance(reference: np.ndarray, candidate: np.ndarray) -> float:
    """
    Largest elementwise gap between ``candidate`` and ``reference`` after
    rotating ``reference`` by the best global phase.

    The phase is read off the largest-magnitude element of
    ``candidate @ reference^dagger``, which is e^{i phi} I when the two agree.
    """
    if reference.shape != candidate.shape:
        return float('inf')
    overlap = candidate @ reference.conj().T
    pivot = np.unravel_index(np.argmax(np.abs(overlap)), overlap.shape)
    value = overlap[pivot]
    if abs(value) == 0:
        return float('inf')
    phase = value / abs(value)
    return float(np.max(np.abs(candidate - phase * reference)))
