"""
Circuit services for qbench.
"""

import json
import logging
from pathlib import Path
from typing import Any, Dict, List, Tuple, Union

from .exceptions import CircuitError
from .models import (
    Circuit,
    CouplingMap,
    CouplingViolation,
    DeviceProfile,
    DurationEstimate,
    Gate,
    GateKind,
)

logger = logging.getLogger(__name__)


STAR_PAIRS: List[Tuple[int, int]] = [(0, 2), (1, 2), (3, 2), (4, 2)]

BUILTIN_DEVICES: Dict[str, Dict[str, Any]] = {
    'ibmqe-v1': {
        'num_qubits': 5,
        'allowed': STAR_PAIRS,
        'duration_1q_ns': 130,
        'duration_cx_ns': 650,
        'coherence_us': 100,
        'max_gates': 80,
    },
    'ibmqe-v2': {
        'num_qubits': 5,
        'allowed': STAR_PAIRS + [(0, 1), (3, 4)],
        'duration_1q_ns': 130,
        'duration_cx_ns': 650,
        'coherence_us': 100,
        'max_gates': 80,
    },
}


class CircuitService:
    """
    Service for building circuits and checking them against a device.

    All operations are pure: circuits are never mutated, new values are
    returned instead.
    """

    def __init__(self) -> None:
        """Initialize the circuit service."""
        pass

    def append_gate(self, circuit: Circuit, gate: Gate) -> Circuit:
        """
        Append a gate to a circuit.

        Args:
            circuit: The circuit to extend
            gate: The gate to append

        Returns:
            A new circuit with the gate at the end

        Raises:
            CircuitError: If the gate addresses a qubit or bit outside the
                registers, or follows a measurement on the same qubit
        """
        return circuit.with_gates([gate])

    def validate_coupling(self, circuit: Circuit, coupling: CouplingMap) -> List[CouplingViolation]:
        """
        List every CX whose (control, target) pair the coupling map forbids.

        Args:
            circuit: The circuit to check
            coupling: The device coupling map

        Returns:
            One violation per offending CX; an empty list means the circuit
            runs on the device as-is

        Raises:
            CircuitError: If circuit and map disagree on the qubit count
        """
        if circuit.num_qubits != coupling.num_qubits:
            raise CircuitError(
                f"Circuit has {circuit.num_qubits} qubits but the coupling map "
                f"has {coupling.num_qubits}"
            )

        violations = []
        for index, gate in enumerate(circuit.gates):
            if gate.kind != GateKind.CX:
                continue
            control, target = gate.qubits
            if not coupling.allows(control, target):
                violations.append(CouplingViolation(index, control, target))

        if violations:
            logger.info(f"Circuit '{circuit.name}' has {len(violations)} coupling violations")
        return violations

    def estimate_duration(self, circuit: Circuit, profile: DeviceProfile) -> DurationEstimate:
        """
        Estimate serial run time of a circuit.

        Gates run one after another. Barrier and Measure take no time.

        Args:
            circuit: The circuit to time
            profile: Device timing profile

        Returns:
            Duration estimate with coherence and gate-limit flags
        """
        seconds = 0.0
        gate_count = 0
        for gate in circuit.gates:
            if not gate.is_unitary:
                continue
            gate_count += 1
            seconds += profile.duration_cx if gate.is_two_qubit else profile.duration_1q

        estimate = DurationEstimate(
            seconds=seconds,
            exceeds_coherence=seconds > profile.coherence_time,
            gate_count=gate_count,
            exceeds_max_gates=gate_count > profile.max_gates,
        )
        if estimate.exceeds_coherence:
            logger.warning(
                f"Circuit '{circuit.name}' needs {seconds * 1e6:.2f} us, beyond the "
                f"{profile.coherence_time * 1e6:.0f} us coherence time of {profile.name}"
            )
        if estimate.exceeds_max_gates:
            logger.warning(
                f"Circuit '{circuit.name}' has {gate_count} gates, above the "
                f"{profile.max_gates}-gate limit of {profile.name}"
            )
        return estimate

    def parse_device(self, document: Dict[str, Any], name: str = 'custom') -> Tuple[CouplingMap, DeviceProfile]:
        """
        Build a coupling map and device profile from a JSON-like document.

        Args:
            document: Mapping with num_qubits, allowed, duration_1q_ns,
                duration_cx_ns, coherence_us and max_gates
            name: Profile name used in log messages

        Returns:
            Tuple of (coupling map, device profile)

        Raises:
            CircuitError: If a key is missing or a value is invalid
        """
        try:
            coupling = CouplingMap.from_pairs(int(document['num_qubits']), document['allowed'])
            profile = DeviceProfile(
                name=name,
                duration_1q=float(document['duration_1q_ns']) * 1e-9,
                duration_cx=float(document['duration_cx_ns']) * 1e-9,
                coherence_time=float(document['coherence_us']) * 1e-6,
                max_gates=int(document.get('max_gates', 80)),
            )
        except CircuitError:
            raise
        except KeyError as e:
            raise CircuitError(f"Device document '{name}' is missing key {e}") from e
        except (TypeError, ValueError) as e:
            raise CircuitError(f"Device document '{name}' is malformed: {e}") from e
        return coupling, profile

    def load_device(self, source: Union[str, Path]) -> Tuple[CouplingMap, DeviceProfile]:
        """
        Load a device by built-in name or from a JSON file.

        Args:
            source: 'ibmqe-v1', 'ibmqe-v2' or a path to a JSON document

        Returns:
            Tuple of (coupling map, device profile)

        Raises:
            CircuitError: If the file cannot be read or parsed
        """
        key = str(source)
        if key in BUILTIN_DEVICES:
            return self.parse_device(BUILTIN_DEVICES[key], name=key)

        path = Path(source)
        try:
            document = json.loads(path.read_text(encoding='utf-8'))
        except (OSError, json.JSONDecodeError) as e:
            raise CircuitError(f"Cannot read device file {path}: {e}") from e
        logger.info(f"Loaded device description from {path}")
        return self.parse_device(document, name=path.stem)
