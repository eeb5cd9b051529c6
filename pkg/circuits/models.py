"""
Circuit models for qbench.

Circuits, gates and device descriptions are immutable values. Bitstrings
everywhere in qbench put qubit (or classical bit) 0 in the rightmost
position, so a 5-qubit outcome reads ``q4 q3 q2 q1 q0``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterable, List, Optional, Set, Tuple

import networkx as nx
from django.db import models

from .exceptions import CircuitError


class GateKind(models.TextChoices):
    """Gate kinds understood by every backend."""
    X = 'x', 'Pauli X'
    Y = 'y', 'Pauli Y'
    Z = 'z', 'Pauli Z'
    H = 'h', 'Hadamard'
    S = 's', 'Phase S'
    SDG = 'sdg', 'Phase S dagger'
    T = 't', 'Phase T'
    TDG = 'tdg', 'Phase T dagger'
    U1 = 'u1', 'Phase rotation U1'
    CX = 'cx', 'Controlled NOT'
    BARRIER = 'barrier', 'Barrier'
    MEASURE = 'measure', 'Measure'


SINGLE_QUBIT_KINDS: FrozenSet[str] = frozenset({
    GateKind.X, GateKind.Y, GateKind.Z, GateKind.H, GateKind.S,
    GateKind.SDG, GateKind.T, GateKind.TDG, GateKind.U1,
})

DIAGONAL_KINDS: FrozenSet[str] = frozenset({
    GateKind.Z, GateKind.S, GateKind.SDG, GateKind.T, GateKind.TDG, GateKind.U1,
})


@dataclass(frozen=True)
class Gate:
    """
    A single circuit instruction.

    ``qubits`` holds the addressed qubits in operand order, so a CX stores
    ``(control, target)``. ``angle`` is only set for U1 and ``clbit`` only
    for Measure.
    """

    kind: GateKind
    qubits: Tuple[int, ...]
    angle: Optional[float] = None
    clbit: Optional[int] = None

    def __post_init__(self) -> None:
        kind = GateKind(self.kind)
        object.__setattr__(self, 'kind', kind)
        object.__setattr__(self, 'qubits', tuple(int(q) for q in self.qubits))

        if any(q < 0 for q in self.qubits):
            raise CircuitError(f"Negative qubit index in {kind.value} gate: {self.qubits}")

        if kind in SINGLE_QUBIT_KINDS or kind == GateKind.MEASURE:
            if len(self.qubits) != 1:
                raise CircuitError(f"{kind.value} acts on exactly one qubit, got {self.qubits}")
        elif kind == GateKind.CX:
            if len(self.qubits) != 2:
                raise CircuitError(f"cx needs a control and a target, got {self.qubits}")
            if self.qubits[0] == self.qubits[1]:
                raise CircuitError(f"cx control and target must differ, got {self.qubits}")
        elif kind == GateKind.BARRIER:
            if not self.qubits or len(set(self.qubits)) != len(self.qubits):
                raise CircuitError(f"barrier needs distinct qubits, got {self.qubits}")

        if kind == GateKind.U1:
            if self.angle is None or not math.isfinite(self.angle):
                raise CircuitError(f"u1 angle must be a finite real, got {self.angle}")
            object.__setattr__(self, 'angle', float(self.angle))
        elif self.angle is not None:
            raise CircuitError(f"{kind.value} takes no angle")

        if kind == GateKind.MEASURE:
            if self.clbit is None or self.clbit < 0:
                raise CircuitError(f"measure needs a classical bit, got {self.clbit}")
        elif self.clbit is not None:
            raise CircuitError(f"{kind.value} takes no classical bit")

    @classmethod
    def single(cls, kind: GateKind, qubit: int) -> Gate:
        """Build a fixed single-qubit gate such as H or T."""
        return cls(kind, (qubit,))

    @classmethod
    def u1(cls, angle: float, qubit: int) -> Gate:
        return cls(GateKind.U1, (qubit,), angle=angle)

    @classmethod
    def cx(cls, control: int, target: int) -> Gate:
        return cls(GateKind.CX, (control, target))

    @classmethod
    def measure(cls, qubit: int, clbit: int) -> Gate:
        return cls(GateKind.MEASURE, (qubit,), clbit=clbit)

    @classmethod
    def barrier(cls, *qubits: int) -> Gate:
        return cls(GateKind.BARRIER, tuple(qubits))

    @property
    def is_unitary(self) -> bool:
        """True for gates that change the state vector."""
        return self.kind not in (GateKind.BARRIER, GateKind.MEASURE)

    @property
    def is_two_qubit(self) -> bool:
        return self.kind == GateKind.CX

    def __str__(self) -> str:
        if self.kind == GateKind.U1:
            return f"u1({self.angle!r}) q{self.qubits[0]}"
        if self.kind == GateKind.MEASURE:
            return f"measure q{self.qubits[0]} -> c{self.clbit}"
        return f"{self.kind.value} " + ",".join(f"q{q}" for q in self.qubits)


@dataclass(frozen=True)
class Circuit:
    """
    Ordered gate list over ``num_qubits`` qubits and ``num_clbits`` bits.

    Construction validates every index and rejects gates that act on a
    qubit after it has been measured.
    """

    num_qubits: int
    num_clbits: int
    gates: Tuple[Gate, ...] = ()
    name: str = ''

    def __post_init__(self) -> None:
        if self.num_qubits < 1:
            raise CircuitError(f"A circuit needs at least one qubit, got {self.num_qubits}")
        if self.num_clbits < 0:
            raise CircuitError(f"Negative classical register size: {self.num_clbits}")
        object.__setattr__(self, 'gates', tuple(self.gates))

        measured: Set[int] = set()
        for index, gate in enumerate(self.gates):
            self._check_gate(gate, measured, index)
            if gate.kind == GateKind.MEASURE:
                measured.add(gate.qubits[0])

    def _check_gate(self, gate: Gate, measured: Set[int], index: int) -> None:
        for qubit in gate.qubits:
            if qubit >= self.num_qubits:
                raise CircuitError(
                    f"Gate {index} ({gate}) addresses qubit {qubit} "
                    f"but the circuit has {self.num_qubits}"
                )
        if gate.clbit is not None and gate.clbit >= self.num_clbits:
            raise CircuitError(
                f"Gate {index} ({gate}) writes classical bit {gate.clbit} "
                f"but the circuit has {self.num_clbits}"
            )
        if gate.kind != GateKind.BARRIER and measured.intersection(gate.qubits):
            raise CircuitError(f"Gate {index} ({gate}) follows a measurement on the same qubit")

    def __len__(self) -> int:
        return len(self.gates)

    def with_gates(self, gates: Iterable[Gate], name: Optional[str] = None) -> Circuit:
        """Return a circuit with the same registers and the given gates appended."""
        return Circuit(
            num_qubits=self.num_qubits,
            num_clbits=self.num_clbits,
            gates=self.gates + tuple(gates),
            name=self.name if name is None else name,
        )

    def concat(self, other: Circuit) -> Circuit:
        """Append ``other``'s gates; registers must match."""
        if (other.num_qubits, other.num_clbits) != (self.num_qubits, self.num_clbits):
            raise CircuitError("Cannot concatenate circuits with different registers")
        return self.with_gates(other.gates)

    @property
    def unitary_gates(self) -> List[Gate]:
        return [g for g in self.gates if g.is_unitary]

    @property
    def measurements(self) -> List[Gate]:
        return [g for g in self.gates if g.kind == GateKind.MEASURE]

    @property
    def measured_clbits(self) -> List[int]:
        """Classical bits written by the circuit, highest first (bitstring order)."""
        return sorted({g.clbit for g in self.measurements if g.clbit is not None}, reverse=True)

    def without_measurements(self) -> Circuit:
        return Circuit(
            num_qubits=self.num_qubits,
            num_clbits=self.num_clbits,
            gates=tuple(g for g in self.gates if g.kind != GateKind.MEASURE),
            name=self.name,
        )

    def census(self) -> Dict[str, int]:
        """Count gates per kind, e.g. ``{'h': 5, 'cx': 1}``."""
        counts: Dict[str, int] = {}
        for gate in self.gates:
            counts[gate.kind.value] = counts.get(gate.kind.value, 0) + 1
        return counts


@dataclass(frozen=True)
class CouplingMap:
    """Directed CNOT permissions: ``(control, target)`` pairs the device accepts."""

    num_qubits: int
    allowed: FrozenSet[Tuple[int, int]] = field(default_factory=frozenset)

    def __post_init__(self) -> None:
        pairs = frozenset((int(c), int(t)) for c, t in self.allowed)
        for control, target in pairs:
            if control == target:
                raise CircuitError(f"Coupling map contains self-pair ({control},{target})")
            if not (0 <= control < self.num_qubits and 0 <= target < self.num_qubits):
                raise CircuitError(
                    f"Coupling pair ({control},{target}) outside {self.num_qubits} qubits"
                )
        object.__setattr__(self, 'allowed', pairs)

    @classmethod
    def from_pairs(cls, num_qubits: int, pairs: Iterable[Iterable[int]]) -> CouplingMap:
        return cls(num_qubits, frozenset(tuple(p) for p in pairs))  # type: ignore[misc]

    def allows(self, control: int, target: int) -> bool:
        return (control, target) in self.allowed

    def connected(self, a: int, b: int) -> bool:
        """True if a CX can run between ``a`` and ``b`` in either direction."""
        return self.allows(a, b) or self.allows(b, a)

    def graph(self) -> nx.Graph:
        """Undirected connectivity graph used for routing."""
        graph = nx.Graph()
        graph.add_nodes_from(range(self.num_qubits))
        graph.add_edges_from(self.allowed)
        return graph


@dataclass(frozen=True)
class DeviceProfile:
    """Timing envelope of a device. Durations are in seconds."""

    name: str
    duration_1q: float
    duration_cx: float
    coherence_time: float
    max_gates: int = 80

    def __post_init__(self) -> None:
        for label in ('duration_1q', 'duration_cx', 'coherence_time', 'max_gates'):
            value = getattr(self, label)
            if not value > 0:
                raise CircuitError(f"Device profile {label} must be positive, got {value}")


@dataclass(frozen=True)
class CodeSpec:
    """An ``[[m,k,d]]`` code: m physical qubits, k logical qubits, distance d."""

    m: int
    k: int
    d: int

    def __post_init__(self) -> None:
        if not 0 < self.k < self.m:
            raise CircuitError(f"Need 0 < k < m for [[m,k,d]], got [[{self.m},{self.k},{self.d}]]")
        if self.d < 1:
            raise CircuitError(f"Code distance must be at least 1, got {self.d}")

    def __str__(self) -> str:
        return f"[[{self.m},{self.k},{self.d}]]"


@dataclass(frozen=True)
class CouplingViolation:
    """A CX whose direction the coupling map does not allow."""

    index: int
    control: int
    target: int

    def to_dict(self) -> Dict[str, int]:
        return {'index': self.index, 'control': self.control, 'target': self.target}


@dataclass(frozen=True)
class DurationEstimate:
    """Serial execution time of a circuit on a device profile."""

    seconds: float
    exceeds_coherence: bool
    gate_count: int
    exceeds_max_gates: bool
