"""
Error-correcting code benchmarks for qbench.

Two one-logical-qubit codes on five physical qubits:

- the distance-2 code ``[[5,1,2]]``, data qubit q0, checked by postselecting
  on its eight codeword strings;
- the distance-3 code ``[[5,1,3]]``, data qubit q2, whose encoder is written
  with hub-legal gates only so it runs on the star coupling of ibmqe-v1.
"""

import logging
import math
from functools import partial
from typing import Dict, List, Optional

from circuits.models import Circuit, CodeSpec, Gate, GateKind
from simulator.models import CountsTable
from transpiler.rules import expand_cy, expand_cz, expand_swap, reverse_cnot

from .exceptions import BenchmarkError
from .models import (
    BenchmarkCase,
    CodeVariant,
    CodewordTable,
    PostselectionResult,
    Suite,
)

logger = logging.getLogger(__name__)

NUM_QUBITS = 5
MAX_K = 8

SURFACE_CODE = CodeSpec(5, 1, 2)
SURFACE_DATA_QUBIT = 0
SURFACE_LOGICAL_X = (0, 1)

_SURFACE_LOGICAL0 = ('00000', '01111', '10110', '11001')
_SURFACE_MASK = 0b00011

SURFACE_CODEWORDS = CodewordTable(
    logical0={key: 0.5 for key in _SURFACE_LOGICAL0},
    logical1={format(int(key, 2) ^ _SURFACE_MASK, '05b'): 0.5 for key in _SURFACE_LOGICAL0},
)

FIVE_QUBIT_CODE = CodeSpec(5, 1, 3)
FIVE_QUBIT_DATA_QUBIT = 2
HUB = 2
# Phase edges of the distance-3 codewords: a ring through all five qubits.
_RING = ((4, 3), (3, 2), (2, 1), (1, 0), (0, 4))


def _check_k(k: int) -> None:
    if not 0 <= k <= MAX_K:
        raise BenchmarkError(f"K must lie in 0..{MAX_K}, got {k}")


def _measure_all() -> List[Gate]:
    return [Gate.measure(q, q) for q in range(NUM_QUBITS)]


def _rotation_probabilities(k: int, variant: CodeVariant) -> Dict[int, float]:
    """P(0) and P(1) of the unencoded data qubit after the K-dependent gates."""
    if variant == CodeVariant.PRE_ENCODE_T:
        angle = math.pi * k / 8
        return {0: math.cos(angle) ** 2, 1: math.sin(angle) ** 2}
    return {0: 1.0, 1: 0.0} if k % 2 == 0 else {0: 0.0, 1: 1.0}


def _rotation_gates(k: int, variant: CodeVariant, qubit: int) -> List[Gate]:
    if variant == CodeVariant.PRE_ENCODE_T:
        return (
            [Gate.single(GateKind.H, qubit)]
            + [Gate.single(GateKind.T, qubit)] * k
            + [Gate.single(GateKind.H, qubit)]
        )
    return [Gate.single(GateKind.X, qubit)] * k


def surface_encoder() -> List[Gate]:
    """Maps |0000d> to d's codeword: copy d into q1, then spread the two checks from q3 and q4."""
    return [
        Gate.cx(0, 1),
        Gate.single(GateKind.H, 3),
        Gate.single(GateKind.H, 4),
        Gate.cx(4, 2),
        Gate.cx(4, 1),
        Gate.cx(3, 2),
        Gate.cx(3, 1),
        Gate.cx(3, 0),
    ]


def gen_surface_code_case(k: int, variant: str, name: Optional[str] = None) -> BenchmarkCase:
    """
    Build a [[5,1,2]] logical-rotation case.

    pre-encode-T applies H T^K H to the data qubit and then encodes;
    logical-X encodes and then applies K logical X gates (X0 X1).
    After postselection P(|0>_L) is cos^2(pi K / 8), or 1 / 0 by the parity of K.

    Raises:
        BenchmarkError: If K is outside 0..8 or the variant is unknown
    """
    _check_k(k)
    kind = _variant(variant)
    if kind == CodeVariant.PRE_ENCODE_T:
        gates = _rotation_gates(k, kind, SURFACE_DATA_QUBIT) + surface_encoder()
    else:
        logical_x = [Gate.single(GateKind.X, q) for q in SURFACE_LOGICAL_X]
        gates = surface_encoder() + logical_x * k

    probabilities = _rotation_probabilities(k, kind)
    oracle: Dict[str, float] = {}
    for column, words in ((0, SURFACE_CODEWORDS.logical0), (1, SURFACE_CODEWORDS.logical1)):
        if probabilities[column] > 0:
            oracle.update({key: probabilities[column] / len(words) for key in words})

    name = name or f"surface-{kind.value}-k{k}"
    return BenchmarkCase(
        name=name,
        family=Suite.SURFACE,
        circuit=Circuit(NUM_QUBITS, NUM_QUBITS, tuple(gates + _measure_all()), name=name),
        oracle=oracle,
        params={'K': k, 'variant': kind.value, 'code': str(SURFACE_CODE), 'p_logical0': probabilities[0]},
        codewords=SURFACE_CODEWORDS,
    )


def gen_single_qubit_reference(k: int, variant: str, name: Optional[str] = None) -> BenchmarkCase:
    """The same rotation on a bare qubit (q0), without encoding."""
    _check_k(k)
    kind = _variant(variant)
    gates = _rotation_gates(k, kind, SURFACE_DATA_QUBIT) + [Gate.measure(SURFACE_DATA_QUBIT, SURFACE_DATA_QUBIT)]
    probabilities = _rotation_probabilities(k, kind)

    name = name or f"reference-{kind.value}-k{k}"
    return BenchmarkCase(
        name=name,
        family=Suite.SURFACE,
        circuit=Circuit(NUM_QUBITS, NUM_QUBITS, tuple(gates), name=name),
        oracle={str(bit): p for bit, p in probabilities.items() if p > 0},
        params={'K': k, 'variant': kind.value, 'code': 'none', 'p_logical0': probabilities[0]},
    )


def _variant(variant: str) -> CodeVariant:
    try:
        return CodeVariant(variant)
    except ValueError:
        raise BenchmarkError(
            f"Unknown code variant '{variant}', expected one of {list(CodeVariant.values)}"
        ) from None


def postselect(counts: CountsTable, table: CodewordTable) -> PostselectionResult:
    """
    Keep only shots that landed on a codeword string.

    Args:
        counts: Counts over the five code qubits, canonical bit order
        table: The code's codeword strings

    Returns:
        Renormalised logical frequencies and the retained fraction; a result
        with no retained shots is inconclusive and reports zero frequencies

    Raises:
        BenchmarkError: If the counts are not over five bits
    """
    if counts.width != NUM_QUBITS:
        raise BenchmarkError(f"Postselection needs {NUM_QUBITS}-bit outcomes, got {counts.width}")

    kept = [0, 0]
    for key, value in counts.counts.items():
        column = table.column_of(key)
        if column is not None:
            kept[column] += value
    retained = kept[0] + kept[1]

    if retained == 0:
        logger.warning(f"Postselection of '{counts.circuit_name}' retained no shots out of {counts.shots}")
        return PostselectionResult(0.0, 0.0, 0.0, 0, counts.shots)
    return PostselectionResult(
        f_logical0=kept[0] / retained,
        f_logical1=kept[1] / retained,
        retained_fraction=retained / counts.shots,
        retained_shots=retained,
        shots=counts.shots,
    )


def five_qubit_amplitudes(logical: int) -> Dict[str, float]:
    """
    Signed amplitudes of |0>_L or |1>_L of the [[5,1,3]] code.

    |0>_L holds every even-weight string x with sign (-1)^(number of ring
    edges with both ends set); |1>_L at y equals |0>_L at the complement of y.
    """
    if logical not in (0, 1):
        raise BenchmarkError(f"Logical value must be 0 or 1, got {logical}")
    table: Dict[str, float] = {}
    for x in range(1 << NUM_QUBITS):
        if bin(x).count('1') % 2:
            continue
        edges = sum(1 for i, j in _RING if (x >> i) & 1 and (x >> j) & 1)
        word = x ^ 0b11111 if logical else x
        table[format(word, '05b')] = (-1.0) ** edges / 4
    return table


FIVE_QUBIT_CODEWORDS = CodewordTable(five_qubit_amplitudes(0), five_qubit_amplitudes(1))


def hub_cnot(control: int, target: int, hub: int = HUB) -> List[Gate]:
    """
    CX(control, target) using only CX(i, hub) for i != hub.

    CX out of the hub is Hadamard-reversed; CX between two leaves swaps the
    target into the hub, acts there and swaps back.
    """
    if target == hub:
        return [Gate.cx(control, hub)]
    if control == hub:
        return reverse_cnot(hub, target)
    swap: List[Gate] = []
    for gate in expand_swap(target, hub):
        swap += hub_cnot(*gate.qubits, hub=hub)
    return swap + [Gate.cx(control, hub)] + swap


def _legalized(gates: List[Gate]) -> List[Gate]:
    legal: List[Gate] = []
    for gate in gates:
        legal += hub_cnot(*gate.qubits) if gate.kind == GateKind.CX else [gate]
    return legal


_ADJOINT = {
    GateKind.H: GateKind.H,
    GateKind.X: GateKind.X,
    GateKind.Z: GateKind.Z,
    GateKind.S: GateKind.SDG,
    GateKind.SDG: GateKind.S,
}


def _cancel_adjacent(gates: List[Gate]) -> List[Gate]:
    """Drop neighbouring one-qubit pairs that multiply to the identity."""
    kept: List[Gate] = []
    for gate in gates:
        if kept and gate.kind in _ADJOINT and kept[-1].qubits == gate.qubits and kept[-1].kind == _ADJOINT[gate.kind]:
            kept.pop()
        else:
            kept.append(gate)
    return kept


def _controlled_minus_z(control: int, target: int) -> List[Gate]:
    """C-Z with the Hadamards on the control line, so they meet the control's own H."""
    return expand_cz(target, control) + [Gate.single(GateKind.Z, control)]


def encoder_513_gates(q2_value: int, legalize: bool = True) -> List[Gate]:
    """
    |00Q00> -> |Q>_L.

    Each ancilla a in (0, 1, 3, 4) is put through H and then controls the
    rest of a stabilizer generator that is X or Y on a and I or Z on the
    other ancillas. Y-type generators give controlled-Y on q2 and a factor
    i on the control; with the C-Z to the earlier ancilla this becomes
    C-Z, CY and S dagger (SZ = S dagger). X then Z on q2 for Q = 1 fixes
    the sign of |1>_L. With ``legalize`` every CX is rewritten for the
    star coupling.
    """
    if q2_value not in (0, 1):
        raise BenchmarkError(f"q2 value must be 0 or 1, got {q2_value}")
    data = FIVE_QUBIT_DATA_QUBIT
    h = partial(Gate.single, GateKind.H)
    gates: List[Gate] = [Gate.single(GateKind.X, data), Gate.single(GateKind.Z, data)] if q2_value else []
    # X0 X2 Z3 Z4
    gates += [h(0), Gate.cx(0, data)]
    # Z0 Y1 Y2 Z3
    gates += [h(1)] + _controlled_minus_z(1, 0) + expand_cy(1, data) + [Gate.single(GateKind.SDG, 1)]
    # Z1 Y2 Y3 Z4
    gates += [h(3)] + _controlled_minus_z(3, 1) + expand_cy(3, data) + [Gate.single(GateKind.SDG, 3)]
    # Z0 Z1 X2 X4
    gates += [h(4)] + expand_cz(0, 4) + expand_cz(1, 4) + [Gate.cx(4, data)]
    gates = _cancel_adjacent(gates)
    return _legalized(gates) if legalize else gates


def logical_513_encoder(q2_value: int = 0) -> Circuit:
    """The encoder before hub rewriting, without measurement."""
    return Circuit(NUM_QUBITS, 0, tuple(encoder_513_gates(q2_value, legalize=False)), name=f"encoder513-q2-{q2_value}")


def gen_513_encoder(q2_value: int, name: Optional[str] = None) -> BenchmarkCase:
    """
    Build the [[5,1,3]] encoding case for data value ``q2_value``.

    The oracle is uniform 1/16 over the codeword's support; the signed
    amplitude table is attached for exact checks of the final state.
    """
    amplitudes = FIVE_QUBIT_CODEWORDS.logical1 if q2_value == 1 else FIVE_QUBIT_CODEWORDS.logical0
    gates = encoder_513_gates(q2_value) + _measure_all()
    name = name or f"code513-q2-{q2_value}"
    return BenchmarkCase(
        name=name,
        family=Suite.CODE513,
        circuit=Circuit(NUM_QUBITS, NUM_QUBITS, tuple(gates), name=name),
        oracle={key: amplitude ** 2 for key, amplitude in amplitudes.items()},
        params={'q2': q2_value, 'code': str(FIVE_QUBIT_CODE)},
        codewords=FIVE_QUBIT_CODEWORDS,
        amplitudes=dict(amplitudes),
    )


def surface_cases() -> List[BenchmarkCase]:
    """Encoded and bare cases for K = 0..8 in both variants."""
    cases = []
    for variant in CodeVariant.values:
        for k in range(MAX_K + 1):
            cases.append(gen_surface_code_case(k, variant))
            cases.append(gen_single_qubit_reference(k, variant))
    logger.debug(f"Built {len(cases)} surface-code cases")
    return cases


def code513_cases() -> List[BenchmarkCase]:
    return [gen_513_encoder(0), gen_513_encoder(1)]
