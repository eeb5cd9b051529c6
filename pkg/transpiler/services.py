"""
Transpiler services for qbench.
"""

import logging
from typing import Any, Dict, List, Optional, Tuple

import networkx as nx

from circuits.exceptions import CircuitError
from circuits.models import Circuit, CouplingMap, Gate, GateKind
from simulator.exceptions import SimulationError
from simulator.services import SimulatorService

from .equivalence import aligned_distance, permute_rows
from .exceptions import UnroutableError
from .models import Layout, RoutingResult
from .rules import expand_swap, reverse_cnot

logger = logging.getLogger(__name__)


class _Router:
    """Greedy single pass over a circuit, tracking where each logical qubit sits."""

    def __init__(self, coupling: CouplingMap) -> None:
        self.coupling = coupling
        self.graph = coupling.graph()
        self.layout = Layout.identity(coupling.num_qubits)
        self.gates: List[Gate] = []
        self.history: List[Tuple[int, int]] = []
        self.reversed = 0

    def emit_cx(self, control: int, target: int) -> None:
        """Emit a CX on physical qubits, reversing it if only the other direction is wired."""
        if self.coupling.allows(control, target):
            self.gates.append(Gate.cx(control, target))
        elif self.coupling.allows(target, control):
            self.gates.extend(reverse_cnot(control, target))
            self.reversed += 1
        else:
            raise UnroutableError(f"Physical qubits {control} and {target} are not coupled")

    def emit_swap(self, a: int, b: int) -> None:
        first, second = (a, b) if self.coupling.allows(a, b) else (b, a)
        for gate in expand_swap(first, second):
            self.emit_cx(*gate.qubits)
        self.layout = self.layout.swapped(a, b)
        self.history.append((a, b))

    def path(self, source: int, target: int) -> List[int]:
        try:
            return list(nx.shortest_path(self.graph, source, target))
        except nx.NetworkXNoPath as e:
            raise UnroutableError(f"No path between physical qubits {source} and {target}") from e

    def add(self, gate: Gate) -> None:
        place = self.layout.physical
        if gate.kind == GateKind.CX:
            control, target = (place[q] for q in gate.qubits)
            if not self.coupling.connected(control, target):
                # Walk the control along the shortest path until it neighbours the target.
                route = self.path(control, target)
                for here, there in zip(route[:-2], route[1:-1]):
                    self.emit_swap(here, there)
                control = route[-2]
            self.emit_cx(control, target)
        elif gate.kind == GateKind.MEASURE:
            assert gate.clbit is not None
            self.gates.append(Gate.measure(place[gate.qubits[0]], gate.clbit))
        elif gate.kind == GateKind.BARRIER:
            self.gates.append(Gate.barrier(*(place[q] for q in gate.qubits)))
        else:
            self.gates.append(Gate(gate.kind, (place[gate.qubits[0]],), angle=gate.angle))

    def restore(self) -> None:
        """Undo every SWAP, last first."""
        for a, b in reversed(list(self.history)):
            self.emit_swap(a, b)


class TranspilerService:
    """
    Service for mapping circuits onto a device coupling map.

    Routing is greedy and never reorders gates, so nothing crosses a
    barrier. No gate cancellation is attempted.
    """

    def __init__(self) -> None:
        """Initialize the transpiler service."""
        self.simulator = SimulatorService()

    def route(self, circuit: Circuit, coupling: CouplingMap, restore_layout: bool = False) -> RoutingResult:
        """
        Rewrite a circuit so every CX runs on an allowed (control, target) pair.

        Reversed CX pairs get the Hadamard-conjugated form. Uncoupled pairs
        are brought together with SWAPs along a shortest path; the resulting
        qubit permutation is reported as the layout, not undone.

        Args:
            circuit: Circuit on the device's qubits
            coupling: Device coupling map
            restore_layout: Append SWAPs that return every qubit home

        Returns:
            RoutingResult; unpacks as (circuit, layout)

        Raises:
            CircuitError: If circuit and map differ in qubit count
            UnroutableError: If two qubits are disconnected in the coupling graph,
                or a SWAP would touch an already measured qubit
        """
        if circuit.num_qubits != coupling.num_qubits:
            raise CircuitError(
                f"Circuit has {circuit.num_qubits} qubits but the coupling map has {coupling.num_qubits}"
            )

        router = _Router(coupling)
        for gate in circuit.gates:
            router.add(gate)
        if restore_layout:
            router.restore()

        try:
            routed = Circuit(circuit.num_qubits, circuit.num_clbits, tuple(router.gates), name=circuit.name)
        except CircuitError as e:
            raise UnroutableError(f"Routing '{circuit.name}' needs a SWAP after a measurement: {e}") from e

        before, after = circuit.census(), routed.census()
        metadata: Dict[str, Any] = {
            'swaps': len(router.history),
            'reversed_cnots': router.reversed,
            'added_cx': after.get('cx', 0) - before.get('cx', 0),
            'added_h': after.get('h', 0) - before.get('h', 0),
            'layout': router.layout.to_list(),
        }
        if router.history or router.reversed:
            logger.info(f"Routed '{circuit.name}': {metadata}")
        return RoutingResult(routed, router.layout, metadata)

    def verify_equivalence(
        self,
        first: Circuit,
        second: Circuit,
        layout: Optional[Layout] = None,
        tolerance: float = 1e-10,
    ) -> bool:
        """
        Check that ``second`` implements P(layout) times ``first`` up to a global phase.

        Args:
            first: Reference circuit without measurements
            second: Candidate circuit without measurements
            layout: Final qubit placement of ``second``; identity if omitted
            tolerance: Largest accepted elementwise deviation

        Returns:
            True if max |U2 - e^{i phi} P U1| < tolerance

        Raises:
            SimulationError: If the circuits are too wide, differ in width, or measure
        """
        if first.num_qubits != second.num_qubits:
            raise SimulationError(
                f"Cannot compare a {first.num_qubits}-qubit circuit with a {second.num_qubits}-qubit one"
            )
        layout = layout or Layout.identity(first.num_qubits)
        reference = permute_rows(layout, self.simulator.unitary_of(first))
        candidate = self.simulator.unitary_of(second)
        distance = aligned_distance(reference, candidate)
        logger.debug(f"Equivalence of '{first.name}' and '{second.name}': deviation {distance:.3e}")
        return distance < tolerance
