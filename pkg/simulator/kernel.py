"""
State-vector kernel.

Amplitude index bit k is qubit k. A single-qubit gate on qubit q visits each
pair (i, i | 1<<q) with bit q of i clear exactly once; the pairs are taken as
strided views of the array rather than gathered index lists, so a gate costs
one pass over 2^n amplitudes and no copies beyond one half-slice.

Every function works in place on arrays of shape (2^n,) or (2^n, k); the
second form lets ``unitary_of`` push all basis columns through at once.
Arrays must be C-contiguous so that reshapes stay views.
"""

from typing import Sequence

import numpy as np

from circuits.matrices import PAULIS, is_diagonal, single_qubit_matrix
from circuits.models import Gate, GateKind


def zero_state(num_qubits: int) -> np.ndarray:
    state = np.zeros(1 << num_qubits, dtype=complex)
    state[0] = 1.0
    return state


def _columns(state: np.ndarray) -> int:
    return state.shape[1] if state.ndim == 2 else 1


def _pair_view(state: np.ndarray, num_qubits: int, qubit: int) -> np.ndarray:
    """View with axis 1 selecting bit ``qubit`` of the row index."""
    return state.reshape(1 << (num_qubits - qubit - 1), 2, (1 << qubit) * _columns(state))


def apply_matrix(state: np.ndarray, num_qubits: int, qubit: int, matrix: np.ndarray) -> None:
    view = _pair_view(state, num_qubits, qubit)
    lower = view[:, 0, :]
    upper = view[:, 1, :]
    if is_diagonal(matrix):
        if matrix[0, 0] != 1:
            lower *= matrix[0, 0]
        if matrix[1, 1] != 1:
            upper *= matrix[1, 1]
        return
    kept = lower.copy()
    lower *= matrix[0, 0]
    lower += matrix[0, 1] * upper
    upper *= matrix[1, 1]
    upper += matrix[1, 0] * kept


def apply_x(state: np.ndarray, num_qubits: int, qubit: int) -> None:
    view = _pair_view(state, num_qubits, qubit)
    kept = view[:, 0, :].copy()
    view[:, 0, :] = view[:, 1, :]
    view[:, 1, :] = kept


def apply_cx(state: np.ndarray, num_qubits: int, control: int, target: int) -> None:
    low, high = sorted((control, target))
    view = state.reshape(
        1 << (num_qubits - high - 1), 2,
        1 << (high - low - 1), 2,
        (1 << low) * _columns(state),
    )
    if control == high:
        kept = view[:, 1, :, 0, :].copy()
        view[:, 1, :, 0, :] = view[:, 1, :, 1, :]
        view[:, 1, :, 1, :] = kept
    else:
        kept = view[:, 0, :, 1, :].copy()
        view[:, 0, :, 1, :] = view[:, 1, :, 1, :]
        view[:, 1, :, 1, :] = kept


def apply_pauli(state: np.ndarray, num_qubits: int, qubit: int, pauli: int) -> None:
    """Apply Pauli 1=X, 2=Y, 3=Z; 0 is a no-op."""
    if pauli == 1:
        apply_x(state, num_qubits, qubit)
    elif pauli:
        apply_matrix(state, num_qubits, qubit, PAULIS[pauli])


def apply(state: np.ndarray, num_qubits: int, gate: Gate) -> None:
    """Apply one unitary gate in place. Barriers are no-ops."""
    if gate.kind == GateKind.CX:
        apply_cx(state, num_qubits, gate.qubits[0], gate.qubits[1])
    elif gate.kind == GateKind.X:
        apply_x(state, num_qubits, gate.qubits[0])
    elif gate.kind == GateKind.BARRIER:
        return
    else:
        apply_matrix(state, num_qubits, gate.qubits[0], single_qubit_matrix(gate))


def marginal_probabilities(state: np.ndarray, num_qubits: int, qubit_of_position: Sequence[int]) -> np.ndarray:
    """
    Born-rule probabilities over measured bits.

    ``qubit_of_position[k]`` is the qubit read into bit k of the outcome
    index (bit 0 is the rightmost bitstring character). Probabilities of
    unmeasured qubits are summed out.
    """
    probs = np.abs(state) ** 2
    indices = np.arange(1 << num_qubits, dtype=np.int64)
    keys = np.zeros_like(indices)
    for position, qubit in enumerate(qubit_of_position):
        keys |= ((indices >> qubit) & 1) << position
    return np.bincount(keys, weights=probs, minlength=1 << len(qubit_of_position))
