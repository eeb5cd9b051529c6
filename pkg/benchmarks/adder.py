"""
Two-bit Fourier adder benchmark for qbench.

b <- (a + b) mod 4 with b moved to the Fourier basis, phases added from a
and moved back. Controlled phases are built from U1 and CX only.
"""

import logging
import math
from dataclasses import dataclass
from typing import Dict, FrozenSet, Iterable, List, Optional, Tuple

from circuits.models import Circuit, Gate, GateKind

from .exceptions import BenchmarkError
from .models import BenchmarkCase, Suite

logger = logging.getLogger(__name__)

NUM_QUBITS = 5
OPERAND_FLAGS: Dict[str, Tuple[str, ...]] = {
    'a': ('a0', 'a1', 'a01'),
    'b': ('b0', 'b1', 'b01'),
}
SUPERPOSITION_FLAGS: FrozenSet[str] = frozenset(f for flags in OPERAND_FLAGS.values() for f in flags)


@dataclass(frozen=True)
class AdderLayout:
    """Physical qubits of each operand, least significant bit first."""

    name: str
    a: Tuple[int, int]
    b: Tuple[int, int]

    @property
    def qubits(self) -> Tuple[int, ...]:
        return tuple(sorted(self.a + self.b))

    @property
    def columns(self) -> Tuple[int, int, int, int]:
        """Report order: sum msb, sum lsb, a lsb, a msb."""
        return (self.b[1], self.b[0], self.a[0], self.a[1])


ADDER_LAYOUTS: Dict[str, AdderLayout] = {
    'q0-3': AdderLayout('q0-3', a=(0, 1), b=(2, 3)),
    'q1-4': AdderLayout('q1-4', a=(1, 3), b=(4, 2)),
}


def adder_oracle(a: int, b: int) -> int:
    """(a + b) mod 4."""
    _check_operand('a', a)
    _check_operand('b', b)
    return (a + b) % 4


def _check_operand(label: str, value: int) -> None:
    if value not in range(4):
        raise BenchmarkError(f"Adder operand {label} must be in 0..3, got {value}")


def controlled_phase(angle: float, control: int, target: int) -> List[Gate]:
    """CU1(angle) = U1(angle/2)_c U1(angle/2)_t C_ct U1(-angle/2)_t C_ct."""
    half = angle / 2
    return [
        Gate.u1(half, control),
        Gate.u1(half, target),
        Gate.cx(control, target),
        Gate.u1(-half, target),
        Gate.cx(control, target),
    ]


def _superposition_gates(flags: FrozenSet[str], layout: AdderLayout) -> List[Gate]:
    registers = {'a': layout.a, 'b': layout.b}
    gates = []
    for operand, (low, high) in registers.items():
        if f"{operand}0" in flags:
            gates.append(Gate.single(GateKind.H, low))
        if f"{operand}1" in flags:
            gates.append(Gate.single(GateKind.H, high))
    for operand, (low, high) in registers.items():
        if f"{operand}01" in flags:
            gates += [Gate.single(GateKind.H, low), Gate.cx(low, high)]
    return gates


def _validate_flags(superpose: Iterable[str]) -> FrozenSet[str]:
    flags = frozenset(superpose)
    unknown = flags - SUPERPOSITION_FLAGS
    if unknown:
        raise BenchmarkError(f"Unknown superposition flags {sorted(unknown)}")
    for operand in OPERAND_FLAGS:
        if f"{operand}01" in flags and f"{operand}0" in flags:
            raise BenchmarkError(f"Flags {operand}0 and {operand}01 both put H on the same qubit")
    return flags


def operand_distribution(value: int, flags: FrozenSet[str], operand: str) -> Dict[int, float]:
    """
    Values an operand register holds after its superposition gates.

    H on a basis state followed by CX yields equal-weight branches on
    distinct basis states, so the register is a uniform mixture.
    """
    distribution = {value: 1.0}

    def split(bit: int) -> None:
        nonlocal distribution
        spread: Dict[int, float] = {}
        for v, p in distribution.items():
            for choice in (0, 1):
                w = (v & ~(1 << bit)) | (choice << bit)
                spread[w] = spread.get(w, 0.0) + p / 2
        distribution = spread

    for bit in (0, 1):
        if f"{operand}{bit}" in flags:
            split(bit)
    if f"{operand}01" in flags:
        split(0)
        distribution = {v ^ ((v & 1) << 1): p for v, p in distribution.items()}
    return distribution


def _outcome_key(layout: AdderLayout, a: int, total: int) -> str:
    bits = {
        layout.a[0]: a & 1, layout.a[1]: (a >> 1) & 1,
        layout.b[0]: total & 1, layout.b[1]: (total >> 1) & 1,
    }
    return ''.join(str(bits[q]) for q in sorted(bits, reverse=True))


def gen_adder(
    a: int,
    b: int,
    superpose: Iterable[str] = (),
    layout: str = 'q0-3',
    name: Optional[str] = None,
) -> BenchmarkCase:
    """
    Build the adder case for inputs a and b.

    Args:
        a: Addend, 0..3
        b: Second operand, 0..3; its register receives the sum
        superpose: Superposition flags: a0, a1, b0, b1 put H on one input
            bit; a01, b01 apply H then CX inside the operand
        layout: 'q0-3' or 'q1-4'
        name: Case name; derived from the inputs if omitted

    Returns:
        Benchmark case whose oracle is the mixture of (a + b) mod 4 over
        the superposed inputs

    Raises:
        BenchmarkError: If an operand, flag or layout is invalid
    """
    _check_operand('a', a)
    _check_operand('b', b)
    flags = _validate_flags(superpose)
    try:
        place = ADDER_LAYOUTS[layout]
    except KeyError:
        raise BenchmarkError(f"Unknown adder layout '{layout}', expected one of {sorted(ADDER_LAYOUTS)}") from None

    (a0, a1), (b0, b1) = place.a, place.b
    gates: List[Gate] = []
    for qubit, bit in ((a0, a & 1), (a1, a >> 1), (b0, b & 1), (b1, b >> 1)):
        if bit:
            gates.append(Gate.single(GateKind.X, qubit))
    gates += _superposition_gates(flags, place)
    gates.append(Gate.barrier(*place.qubits))

    gates.append(Gate.single(GateKind.H, b1))
    gates += controlled_phase(math.pi / 2, b0, b1)
    gates.append(Gate.single(GateKind.H, b0))
    gates.append(Gate.barrier(*place.qubits))

    gates += controlled_phase(math.pi / 2, a0, b1)
    gates += controlled_phase(math.pi, a1, b1)
    gates += controlled_phase(math.pi, a0, b0)
    gates.append(Gate.barrier(*place.qubits))

    gates.append(Gate.single(GateKind.H, b0))
    gates += controlled_phase(-math.pi / 2, b0, b1)
    gates.append(Gate.single(GateKind.H, b1))
    gates += [Gate.measure(q, q) for q in place.qubits]

    oracle: Dict[str, float] = {}
    for a_value, pa in operand_distribution(a, flags, 'a').items():
        for b_value, pb in operand_distribution(b, flags, 'b').items():
            key = _outcome_key(place, a_value, (a_value + b_value) % 4)
            oracle[key] = oracle.get(key, 0.0) + pa * pb

    if name is None:
        name = f"adder-{layout}-{a}-plus-{b}"
        if flags:
            name += '-sup-' + '-'.join(sorted(flags))
    return BenchmarkCase(
        name=name,
        family=Suite.ADDER,
        circuit=Circuit(NUM_QUBITS, NUM_QUBITS, tuple(gates), name=name),
        oracle=oracle,
        qubit_column_map=place.columns,
        params={
            'a': a,
            'b': b,
            'sum': adder_oracle(a, b),
            'superpose': sorted(flags),
            'layout': layout,
        },
    )


SUPERPOSITION_GROUPS: List[Tuple[int, int, FrozenSet[str]]] = [
    (0, 0, frozenset({'a0'})),
    (1, 0, frozenset({'b01'})),
    (1, 0, frozenset({'a1', 'b01'})),
]


def adder_cases() -> List[BenchmarkCase]:
    """All 16 input pairs on both layouts, then the superposition groups."""
    cases = [
        gen_adder(a, b, layout=layout)
        for layout in ADDER_LAYOUTS
        for a in range(4)
        for b in range(4)
    ]
    cases += [gen_adder(a, b, superpose=flags) for a, b, flags in SUPERPOSITION_GROUPS]
    logger.debug(f"Built {len(cases)} adder cases")
    return cases
