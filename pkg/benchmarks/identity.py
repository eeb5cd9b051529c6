"""
CNOT identity-sequence benchmark for qbench.

Sequences are written as descriptors such as ``(C01)^8`` or
``H0H1X0X1(C02C12)^2(C02)^2(C12)^2(C02C12)^2H0H1``: ``Cij`` is a CX with
control i and target j, ``(...)^k`` repeats a CX block k times, and ``Hq``
and ``Xq`` dress the sequence with single-qubit gates. Tokens run in time
order, left to right.
"""

import logging
from dataclasses import dataclass
from typing import Dict, List, Mapping, Optional, Tuple, Union

import numpy as np
import pyparsing as pp

from circuits.matrices import single_qubit_matrix
from circuits.models import Circuit, Gate, GateKind

from .exceptions import DescriptorError
from .models import BenchmarkCase, Suite

logger = logging.getLogger(__name__)

NUM_QUBITS = 5
DIAGONAL_TOLERANCE = 1e-12


@dataclass(frozen=True)
class Cnot:
    control: int
    target: int


@dataclass(frozen=True)
class Dressing:
    kind: GateKind
    qubit: int


@dataclass(frozen=True)
class CnotBlock:
    """A CX block repeated ``power`` times; a bare ``Cij`` is a block of power 1."""

    cnots: Tuple[Cnot, ...]
    power: int


Token = Union[CnotBlock, Dressing]


_CNOT = pp.Regex(r'C(?P<control>\d)(?P<target>\d)').set_parse_action(
    lambda t: Cnot(int(t['control']), int(t['target']))
)
_DRESSING = pp.Regex(r'(?P<kind>[HX])(?P<qubit>\d)').set_parse_action(
    lambda t: Dressing(GateKind(t['kind'].lower()), int(t['qubit']))
)
_BLOCK = (
    pp.Suppress('(') + pp.Group(pp.OneOrMore(_CNOT)) + pp.Suppress(')')
    + pp.Suppress('^') + pp.Word(pp.nums)
).set_parse_action(lambda t: CnotBlock(tuple(t[0]), int(t[1])))
_BARE_CNOT = _CNOT.copy().add_parse_action(lambda t: CnotBlock((t[0],), 1))

DESCRIPTOR = pp.OneOrMore(_BLOCK | _BARE_CNOT | _DRESSING)


def parse_descriptor(text: str) -> List[Token]:
    """
    Parse a descriptor into CX blocks and dressing gates.

    Raises:
        DescriptorError: If the text does not follow the grammar
    """
    try:
        return list(DESCRIPTOR.parse_string(text, parse_all=True))
    except pp.ParseBaseException as e:
        raise DescriptorError(f"Cannot parse descriptor '{text}' at column {e.col}: {e.msg}") from e


def _linear_map(cnots: Tuple[Cnot, ...], num_qubits: int) -> np.ndarray:
    """CX block as a matrix over GF(2) acting on computational-basis bit vectors."""
    matrix = np.eye(num_qubits, dtype=np.int64)
    for cnot in cnots:
        step = np.eye(num_qubits, dtype=np.int64)
        step[cnot.target, cnot.control] = 1
        matrix = (step @ matrix) % 2
    return matrix


def _check_block(block: CnotBlock, num_qubits: int) -> None:
    if block.power < 1:
        raise DescriptorError(f"Block power must be at least 1, got {block.power}")
    pairs: Dict[Tuple[int, int], int] = {}
    for cnot in block.cnots:
        key = (cnot.control, cnot.target)
        pairs[key] = pairs.get(key, 0) + block.power
    odd = sorted(pair for pair, count in pairs.items() if count % 2)
    if odd:
        raise DescriptorError(f"Odd CX count for pairs {odd} in a block of power {block.power}")

    step = _linear_map(block.cnots, num_qubits)
    total = np.eye(num_qubits, dtype=np.int64)
    for _ in range(block.power):
        total = (step @ total) % 2
    if not np.array_equal(total, np.eye(num_qubits, dtype=np.int64)):
        raise DescriptorError(f"CX block {block} does not compose to the identity")


def _check_dressing(tokens: List[Token], num_qubits: int) -> None:
    """Each qubit's dressing gates must multiply to a diagonal matrix."""
    products = {q: np.eye(2, dtype=complex) for q in range(num_qubits)}
    for token in tokens:
        if isinstance(token, Dressing):
            products[token.qubit] = single_qubit_matrix(Gate.single(token.kind, token.qubit)) @ products[token.qubit]
    for qubit, product in products.items():
        if abs(product[0, 1]) > DIAGONAL_TOLERANCE or abs(product[1, 0]) > DIAGONAL_TOLERANCE:
            raise DescriptorError(f"Dressing on qubit {qubit} does not undo itself")


def _touched(tokens: List[Token]) -> List[int]:
    qubits = set()
    for token in tokens:
        if isinstance(token, Dressing):
            qubits.add(token.qubit)
        else:
            for cnot in token.cnots:
                qubits.update((cnot.control, cnot.target))
    return sorted(qubits)


def sequence_gates(descriptor: str, num_qubits: int = NUM_QUBITS) -> List[Gate]:
    """
    Validated gate list of a descriptor.

    Raises:
        DescriptorError: If the text is malformed, addresses a qubit outside
            the device, has an odd CX count in a block, or is not diagonal
    """
    tokens = parse_descriptor(descriptor)
    outside = [q for q in _touched(tokens) if q >= num_qubits]
    if outside:
        raise DescriptorError(f"Descriptor '{descriptor}' addresses qubits {outside} outside {num_qubits}")
    for token in tokens:
        if isinstance(token, CnotBlock):
            if any(c.control == c.target for c in token.cnots):
                raise DescriptorError(f"Descriptor '{descriptor}' has a CX with equal control and target")
            _check_block(token, num_qubits)
    _check_dressing(tokens, num_qubits)

    gates: List[Gate] = []
    for token in tokens:
        if isinstance(token, Dressing):
            gates.append(Gate.single(token.kind, token.qubit))
        else:
            for _ in range(token.power):
                gates += [Gate.cx(c.control, c.target) for c in token.cnots]
    return gates


def sequence_circuit(descriptor: str, num_qubits: int = NUM_QUBITS) -> Circuit:
    """The bare sequence, without input preparation or measurement."""
    return Circuit(num_qubits, 0, tuple(sequence_gates(descriptor, num_qubits)), name=descriptor)


def gen_identity_sequence(
    descriptor: str,
    inputs: Optional[Mapping[int, int]] = None,
    name: Optional[str] = None,
    num_qubits: int = NUM_QUBITS,
) -> BenchmarkCase:
    """
    Build an identity-sequence case.

    Args:
        descriptor: Sequence descriptor, see the module docstring
        inputs: Input bit per qubit; qubits set to 1 are prepared with X.
            Every qubit named here is measured along with the sequence's qubits.
        name: Case name; derived from the descriptor if omitted
        num_qubits: Device width

    Returns:
        Benchmark case whose oracle is a point mass on the input state

    Raises:
        DescriptorError: If the descriptor or inputs are invalid
    """
    inputs = dict(inputs or {})
    for qubit, bit in inputs.items():
        if bit not in (0, 1) or not 0 <= qubit < num_qubits:
            raise DescriptorError(f"Invalid input bit {bit} on qubit {qubit}")

    body = sequence_gates(descriptor, num_qubits)
    measured = sorted(set(inputs) | set(q for g in body for q in g.qubits))
    if not measured:
        raise DescriptorError(f"Descriptor '{descriptor}' touches no qubit")

    gates = [Gate.single(GateKind.X, q) for q in sorted(inputs) if inputs[q]]
    gates.append(Gate.barrier(*measured))
    gates += body
    gates += [Gate.measure(q, q) for q in measured]

    expected = ''.join(str(inputs.get(q, 0)) for q in reversed(measured))
    name = name or 'identity-' + ''.join(ch for ch in descriptor if ch.isalnum()) + '-' + expected
    return BenchmarkCase(
        name=name,
        family=Suite.IDENTITY,
        circuit=Circuit(num_qubits, num_qubits, tuple(gates), name=name),
        oracle={expected: 1.0},
        params={
            'descriptor': descriptor,
            'input': {str(q): inputs.get(q, 0) for q in reversed(measured)},
            'cx_count': sum(1 for g in body if g.kind == GateKind.CX),
        },
    )


IDENTITY_TABLE: List[Tuple[str, str, Dict[int, int]]] = [
    ('identity-c01x8-00', '(C01)^8', {1: 0, 0: 0}),
    ('identity-c34x8-00', '(C34)^8', {4: 0, 3: 0}),
    ('identity-c34x8-01', '(C34)^8', {4: 0, 3: 1}),
    ('identity-c02c12-111', '(C02C12)^2(C02)^2(C12)^2(C02C12)^2', {2: 1, 1: 1, 0: 1}),
    ('identity-dressed-111', 'H0H1X0X1(C02C12)^2(C02)^2(C12)^2(C02C12)^2H0H1', {2: 1, 1: 1, 0: 1}),
]


def identity_cases() -> List[BenchmarkCase]:
    cases = [gen_identity_sequence(descriptor, inputs, name=name) for name, descriptor, inputs in IDENTITY_TABLE]
    logger.debug(f"Built {len(cases)} identity cases")
    return cases
