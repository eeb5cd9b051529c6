"""
Two-qubit rewrite identities for qbench.

Each rule is checked against its target unitary when it is registered; a
rule that does not reproduce its target up to a global phase is refused.
"""

import logging
from typing import Dict, List, Tuple

import numpy as np

from circuits.exceptions import CircuitError
from circuits.models import Circuit, Gate, GateKind
from simulator.services import SimulatorService

from .equivalence import aligned_distance
from .exceptions import VerificationError
from .models import RewriteRule

logger = logging.getLogger(__name__)

RULE_TOLERANCE = 1e-10

REGISTRY: Dict[str, RewriteRule] = {}


def _distinct(i: int, j: int) -> None:
    if i == j:
        raise CircuitError(f"Rewrite operands must differ, got ({i},{j})")


def expand_cz(i: int, j: int) -> List[Gate]:
    """CZ_ij = H_j C_ij H_j."""
    _distinct(i, j)
    return [Gate.single(GateKind.H, j), Gate.cx(i, j), Gate.single(GateKind.H, j)]


def expand_cminusz(i: int, j: int) -> List[Gate]:
    """Controlled -Z: H_j C_ij H_j Z_i."""
    return expand_cz(i, j) + [Gate.single(GateKind.Z, i)]


def expand_cy(i: int, j: int) -> List[Gate]:
    """CY_ij = H_j C_ij H_j C_ij S_i."""
    return expand_cz(i, j) + [Gate.cx(i, j), Gate.single(GateKind.S, i)]


def reverse_cnot(i: int, j: int) -> List[Gate]:
    """C_ij = H_i H_j C_ji H_i H_j."""
    _distinct(i, j)
    hadamards = [Gate.single(GateKind.H, i), Gate.single(GateKind.H, j)]
    return hadamards + [Gate.cx(j, i)] + hadamards


def expand_swap(i: int, j: int) -> List[Gate]:
    """SWAP_ij = C_ij C_ji C_ij."""
    _distinct(i, j)
    return [Gate.cx(i, j), Gate.cx(j, i), Gate.cx(i, j)]


def register(rule: RewriteRule, tolerance: float = RULE_TOLERANCE) -> RewriteRule:
    """
    Add a rule to the registry after checking it.

    Raises:
        VerificationError: If the expansion misses the target unitary
    """
    circuit = Circuit(2, 0, tuple(rule.expand(0, 1)), name=rule.name)
    actual = SimulatorService().unitary_of(circuit)
    distance = aligned_distance(rule.target, actual)
    if not distance < tolerance:
        raise VerificationError(
            f"Rule '{rule.name}' deviates from its target by {distance:.3e} (tolerance {tolerance:.0e})"
        )
    REGISTRY[rule.name] = rule
    logger.debug(f"Registered rewrite rule '{rule.name}' (deviation {distance:.1e})")
    return rule


def _basis_map(pairs: Dict[int, Tuple[int, complex]]) -> np.ndarray:
    """4x4 matrix sending basis index k to ``pairs`` image; identity elsewhere."""
    matrix = np.eye(4, dtype=complex)
    for source, (dest, amplitude) in pairs.items():
        matrix[:, source] = 0
        matrix[dest, source] = amplitude
    return matrix


# Basis index bit 0 is operand i, bit 1 is operand j.
CZ = np.diag([1, 1, 1, -1]).astype(complex)
CMINUSZ = np.diag([1, -1, 1, 1]).astype(complex)
CY = _basis_map({1: (3, 1j), 3: (1, -1j)})
CX = _basis_map({1: (3, 1), 3: (1, 1)})
SWAP = _basis_map({1: (2, 1), 2: (1, 1)})

register(RewriteRule('cz', CZ, expand_cz, 'CZ_ij = H_j C_ij H_j'))
register(RewriteRule('cminusz', CMINUSZ, expand_cminusz, 'C-Z_ij = H_j C_ij H_j Z_i'))
register(RewriteRule('cy', CY, expand_cy, 'CY_ij = H_j C_ij H_j C_ij S_i'))
register(RewriteRule('reverse_cnot', CX, reverse_cnot, 'C_ij = H_i H_j C_ji H_i H_j'))
register(RewriteRule('swap', SWAP, expand_swap, 'SWAP_ij = C_ij C_ji C_ij'))
