"""
Singlet correlation benchmark for qbench.

Two qubits are prepared in the singlet state and each is measured along a
direction in the y-z plane. With spin values mapped to bits as
q = (1 - S) / 2, the correlators are plain sums of the four outcome
frequencies f(x, y), where x is the bit of qubit 0 and y the bit of qubit 1.
"""

import logging
import math
from typing import Dict, List, Mapping, Optional

from circuits.models import Circuit, Gate, GateKind
from simulator.models import CountsTable

from .exceptions import BenchmarkError
from .models import BenchmarkCase, CorrelatorSet, SingletParams, Suite

logger = logging.getLogger(__name__)

NUM_QUBITS = 5
GRID_STEPS = 16


def _rotation(theta: float, qubit: int) -> List[Gate]:
    # Maps the measurement axis (0, -sin(theta), cos(theta)) onto z.
    return [Gate.single(GateKind.H, qubit), Gate.u1(-theta, qubit), Gate.single(GateKind.H, qubit)]


def singlet_oracle(params: SingletParams) -> Dict[str, float]:
    """Outcome distribution of the singlet measured along a and b, keyed ``yx``."""
    dot = math.cos(params.theta1 - params.theta2)
    equal = (1.0 - dot) / 4.0
    opposite = (1.0 + dot) / 4.0
    return {'00': equal, '01': opposite, '10': opposite, '11': equal}


def gen_singlet(params: SingletParams, name: Optional[str] = None) -> BenchmarkCase:
    """
    Build the singlet correlation case for one pair of angles.

    The circuit uses two X, five H, two U1 and one CX: X0 X1 H0 CX(0,1)
    prepares the singlet, then each qubit gets H U1(-theta) H.
    """
    gates = [
        Gate.single(GateKind.X, 0),
        Gate.single(GateKind.X, 1),
        Gate.single(GateKind.H, 0),
        Gate.cx(0, 1),
        Gate.barrier(0, 1),
    ]
    gates += _rotation(params.theta1, 0) + _rotation(params.theta2, 1)
    gates += [Gate.measure(0, 0), Gate.measure(1, 1)]

    name = name or f"singlet-{params.theta1:.4f}-{params.theta2:.4f}"
    return BenchmarkCase(
        name=name,
        family=Suite.SINGLET,
        circuit=Circuit(NUM_QUBITS, NUM_QUBITS, tuple(gates), name=name),
        oracle=singlet_oracle(params),
        qubit_column_map=(0, 1),
        params={
            'theta1': params.theta1,
            'theta2': params.theta2,
            'E_theory': params.expected_correlation,
        },
    )


def correlators_from_frequencies(frequencies: Mapping[str, float]) -> CorrelatorSet:
    """
    F1, F2 and F from two-bit frequencies keyed ``yx`` (qubit 1 first).

    Raises:
        BenchmarkError: If a key is not a two-bit string
    """
    for key in frequencies:
        if len(key) != 2 or set(key) - {'0', '1'}:
            raise BenchmarkError(f"Singlet frequencies need two-bit keys, got '{key}'")

    def f(x: int, y: int) -> float:
        return float(frequencies.get(f"{y}{x}", 0.0))

    return CorrelatorSet(
        F1=f(0, 0) + f(0, 1) - f(1, 0) - f(1, 1),
        F2=f(0, 0) - f(0, 1) + f(1, 0) - f(1, 1),
        F=f(0, 0) - f(0, 1) - f(1, 0) + f(1, 1),
    )


def singlet_correlators(counts: CountsTable) -> CorrelatorSet:
    """
    Correlators of a measured singlet counts table.

    Raises:
        BenchmarkError: If the table is not over exactly two bits
    """
    if counts.width != 2:
        raise BenchmarkError(
            f"Singlet counts must cover 2 measured bits, '{counts.circuit_name}' has {counts.width}"
        )
    frequencies = {key: value / counts.shots for key, value in counts.counts.items()}
    return correlators_from_frequencies(frequencies)


def singlet_grid() -> List[BenchmarkCase]:
    """
    Two sweeps over theta in steps of pi/8: theta1 = 0 with theta2 varying,
    and theta1 = theta2 varying.
    """
    cases = []
    for step in range(GRID_STEPS + 1):
        theta = step * math.pi / 8
        cases.append(gen_singlet(SingletParams(0.0, theta), name=f"singlet-fixed-{step:02d}"))
    for step in range(GRID_STEPS + 1):
        theta = step * math.pi / 8
        cases.append(gen_singlet(SingletParams(theta, theta), name=f"singlet-equal-{step:02d}"))
    logger.debug(f"Built {len(cases)} singlet cases")
    return cases
