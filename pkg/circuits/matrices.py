"""
Gate matrices for qbench.

Conventions: U1(lambda) = diag(1, e^{i lambda}), S = U1(pi/2), T = U1(pi/4).
CX has no matrix here; the kernel applies it as a permutation.
"""

import cmath
import math

import numpy as np

from .exceptions import CircuitError
from .models import Gate, GateKind

_SQRT_HALF = 1.0 / math.sqrt(2.0)

_FIXED = {
    GateKind.X: np.array([[0, 1], [1, 0]], dtype=complex),
    GateKind.Y: np.array([[0, -1j], [1j, 0]], dtype=complex),
    GateKind.Z: np.array([[1, 0], [0, -1]], dtype=complex),
    GateKind.H: np.array([[1, 1], [1, -1]], dtype=complex) * _SQRT_HALF,
    GateKind.S: np.diag([1, 1j]).astype(complex),
    GateKind.SDG: np.diag([1, -1j]).astype(complex),
    GateKind.T: np.diag([1, cmath.exp(1j * math.pi / 4)]),
    GateKind.TDG: np.diag([1, cmath.exp(-1j * math.pi / 4)]),
}

PAULIS = {
    1: _FIXED[GateKind.X],
    2: _FIXED[GateKind.Y],
    3: _FIXED[GateKind.Z],
}


def single_qubit_matrix(gate: Gate) -> np.ndarray:
    """Return the 2x2 unitary of a single-qubit gate."""
    if gate.kind == GateKind.U1:
        assert gate.angle is not None
        return np.diag([1.0, cmath.exp(1j * gate.angle)]).astype(complex)
    try:
        return _FIXED[gate.kind]
    except KeyError:
        raise CircuitError(f"{gate.kind.value} is not a single-qubit unitary") from None


def is_diagonal(matrix: np.ndarray) -> bool:
    return bool(matrix[0, 1] == 0 and matrix[1, 0] == 0)
