"""
Simulator services for qbench.
"""

import logging
import math
from dataclasses import replace
from typing import Dict, Iterator, List, Tuple

import numpy as np
from django.conf import settings

from circuits.models import Circuit, Gate, GateKind

from . import kernel
from .exceptions import SimulationError
from .models import CountsTable, NoiseChannel, NoiseModel, StateVector

logger = logging.getLogger(__name__)

PROBABILITY_FLOOR = 1e-15


def shot_streams(seed: int, shots: int, block: int) -> Iterator[Tuple[int, np.random.Generator]]:
    """
    Split ``shots`` into fixed-size blocks, each with its own Philox stream.

    Block b always draws from child b of ``SeedSequence(seed)``, so a block
    yields the same numbers whichever worker runs it and in whatever order.
    """
    num_blocks = max(1, math.ceil(shots / block))
    children = np.random.SeedSequence(seed).spawn(num_blocks)
    for index, child in enumerate(children):
        size = min(block, shots - index * block)
        yield size, np.random.Generator(np.random.Philox(child))


def measured_qubits(circuit: Circuit) -> List[int]:
    """Qubit read into each outcome bit, outcome bit 0 first."""
    qubit_of_clbit: Dict[int, int] = {}
    for gate in circuit.measurements:
        assert gate.clbit is not None
        qubit_of_clbit[gate.clbit] = gate.qubits[0]
    return [qubit_of_clbit[c] for c in sorted(qubit_of_clbit)]


class SimulatorService:
    """
    Service for ideal and noisy state-vector execution.

    Results are bit-identical for a given (circuit, shots, seed) triple.
    """

    def __init__(self) -> None:
        """Initialize the simulator service."""
        self.block = int(getattr(settings, 'QBENCH_SAMPLE_BLOCK', 1024))
        self.max_unitary_qubits = int(getattr(settings, 'QBENCH_MAX_VERIFY_QUBITS', 10))

    def apply_gate(self, state: StateVector, gate: Gate) -> StateVector:
        """
        Apply one unitary gate to a state.

        Args:
            state: Input state, left untouched
            gate: A unitary gate (not Measure or Barrier)

        Returns:
            The transformed state

        Raises:
            SimulationError: If the gate is not unitary or addresses a
                qubit outside the state
        """
        if not gate.is_unitary:
            raise SimulationError(f"{gate.kind.value} is not a unitary gate")
        if max(gate.qubits) >= state.num_qubits:
            raise SimulationError(f"Gate {gate} addresses a qubit outside {state.num_qubits} qubits")
        result = state.copy()
        kernel.apply(result.amplitudes, result.num_qubits, gate)
        return result

    def final_state(self, circuit: Circuit) -> StateVector:
        """Run all unitary gates from |0...0> and return the state before measurement."""
        amplitudes = kernel.zero_state(circuit.num_qubits)
        for gate in circuit.unitary_gates:
            kernel.apply(amplitudes, circuit.num_qubits, gate)
        return StateVector(circuit.num_qubits, amplitudes)

    def _outcome_probabilities(self, circuit: Circuit) -> Tuple[int, np.ndarray]:
        qubits = measured_qubits(circuit)
        if not qubits:
            raise SimulationError(f"Circuit '{circuit.name}' has no measurement")
        state = self.final_state(circuit)
        probs = kernel.marginal_probabilities(state.amplitudes, circuit.num_qubits, qubits)
        return len(qubits), probs

    def run_exact(self, circuit: Circuit) -> Dict[str, float]:
        """
        Exact Born-rule distribution over measured bitstrings.

        Args:
            circuit: A measure-last circuit

        Returns:
            Mapping bitstring -> probability for every outcome above 1e-15

        Raises:
            SimulationError: If the circuit measures nothing
        """
        width, probs = self._outcome_probabilities(circuit)
        return {
            format(index, f'0{width}b'): float(p)
            for index, p in enumerate(probs)
            if p > PROBABILITY_FLOOR
        }

    def sample(self, circuit: Circuit, shots: int, seed: int) -> CountsTable:
        """
        Draw ``shots`` outcomes from the exact distribution.

        Args:
            circuit: A measure-last circuit
            shots: Number of shots, at least one
            seed: Root seed of the counter-based streams

        Returns:
            Counts table tagged with backend 'ideal'

        Raises:
            SimulationError: If shots < 1 or nothing is measured
        """
        if shots < 1:
            raise SimulationError(f"shots must be at least 1, got {shots}")
        width, probs = self._outcome_probabilities(circuit)
        probs = probs / probs.sum()

        totals = np.zeros(probs.shape[0], dtype=np.int64)
        for size, rng in shot_streams(seed, shots, self.block):
            totals += rng.multinomial(size, probs)

        return CountsTable(
            shots=shots,
            counts=self._as_counts(totals, width),
            backend='ideal',
            seed=seed,
            circuit_name=circuit.name,
        )

    def unitary_of(self, circuit: Circuit) -> np.ndarray:
        """
        Matrix of a measurement-free circuit.

        Column j is the image of basis state |j>, with qubit 0 as the least
        significant index bit.

        Args:
            circuit: Circuit without Measure gates

        Returns:
            Complex 2^n x 2^n matrix

        Raises:
            SimulationError: If the circuit measures or is too wide
        """
        if circuit.num_qubits > self.max_unitary_qubits:
            raise SimulationError(
                f"unitary_of supports at most {self.max_unitary_qubits} qubits, "
                f"got {circuit.num_qubits}"
            )
        if circuit.measurements:
            raise SimulationError(f"Circuit '{circuit.name}' contains measurements")

        matrix = np.eye(1 << circuit.num_qubits, dtype=complex)
        for gate in circuit.gates:
            kernel.apply(matrix, circuit.num_qubits, gate)
        return matrix

    def run_noisy(self, circuit: Circuit, noise: NoiseModel, shots: int, seed: int) -> CountsTable:
        """
        Monte-Carlo execution with a per-gate Pauli error channel.

        After every unitary gate, each qubit the gate touched is hit by an
        error with probability 1 - p_correct: X for the bit-flip channel, a
        uniformly chosen X, Y or Z for the depolarizing one. Shots sharing
        the same error pattern share one state-vector run.

        Args:
            circuit: A measure-last circuit
            noise: Error model
            shots: Number of shots, at least one
            seed: Root seed of the counter-based streams

        Returns:
            Counts table tagged with backend 'noisy'; metadata records the
            number of shots in which no error fired

        Raises:
            SimulationError: If shots < 1 or nothing is measured
        """
        gates = [g for g in circuit.unitary_gates if g.kind != GateKind.BARRIER]
        slots = sum(len(g.qubits) for g in gates)
        metadata = {'p_correct': noise.p_correct, 'channel': noise.channel.value}

        if noise.p_correct == 1.0 or slots == 0:
            table = self.sample(circuit, shots, seed)
            return replace(table, backend='noisy', metadata={**metadata, 'error_free_shots': shots})

        if shots < 1:
            raise SimulationError(f"shots must be at least 1, got {shots}")
        qubits = measured_qubits(circuit)
        if not qubits:
            raise SimulationError(f"Circuit '{circuit.name}' has no measurement")

        cache: Dict[bytes, np.ndarray] = {}
        totals = np.zeros(1 << len(qubits), dtype=np.int64)
        error_free = 0

        for size, rng in shot_streams(seed, shots, self.block):
            fired = rng.random((size, slots)) >= noise.p_correct
            if noise.channel == NoiseChannel.BIT_FLIP:
                paulis = fired.astype(np.int8)
            else:
                paulis = np.where(fired, rng.integers(1, 4, size=fired.shape), 0).astype(np.int8)

            patterns, multiplicity = np.unique(paulis, axis=0, return_counts=True)
            for pattern, count in zip(patterns, multiplicity):
                key = pattern.tobytes()
                if key not in cache:
                    cache[key] = self._pattern_probabilities(circuit, gates, pattern, qubits)
                if not pattern.any():
                    error_free += int(count)
                totals += rng.multinomial(int(count), cache[key])

        logger.info(
            f"Noisy run of '{circuit.name}': {len(cache)} distinct error patterns, "
            f"{error_free}/{shots} error-free shots"
        )
        return CountsTable(
            shots=shots,
            counts=self._as_counts(totals, len(qubits)),
            backend='noisy',
            seed=seed,
            circuit_name=circuit.name,
            metadata={**metadata, 'error_free_shots': error_free},
        )

    def _pattern_probabilities(
        self,
        circuit: Circuit,
        gates: List[Gate],
        pattern: np.ndarray,
        qubits: List[int],
    ) -> np.ndarray:
        amplitudes = kernel.zero_state(circuit.num_qubits)
        slot = 0
        for gate in gates:
            kernel.apply(amplitudes, circuit.num_qubits, gate)
            for qubit in gate.qubits:
                kernel.apply_pauli(amplitudes, circuit.num_qubits, qubit, int(pattern[slot]))
                slot += 1
        probs = kernel.marginal_probabilities(amplitudes, circuit.num_qubits, qubits)
        return probs / probs.sum()

    @staticmethod
    def _as_counts(totals: np.ndarray, width: int) -> Dict[str, int]:
        return {format(index, f'0{width}b'): int(c) for index, c in enumerate(totals) if c}
