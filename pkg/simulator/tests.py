"""
Unit tests for simulator app.
"""

import math
import time

import numpy as np
from django.test import SimpleTestCase

from circuits.models import Circuit, Gate, GateKind

from . import kernel
from .exceptions import SimulationError
from .models import CountsTable, NoiseChannel, NoiseModel, StateVector
from .services import SimulatorService, shot_streams

SHOTS = 8192
FIVE_SE = 5 / math.sqrt(SHOTS)


def measure_all(num_qubits: int, gates: list, name: str = '') -> Circuit:
    body = list(gates) + [Gate.measure(q, q) for q in range(num_qubits)]
    return Circuit(num_qubits, num_qubits, tuple(body), name=name)


class KernelTest(SimpleTestCase):
    """Test cases for the in-place state-vector kernel."""

    def test_cx_targets_lower_qubit(self) -> None:
        """Test CX with the control above the target."""
        state = kernel.zero_state(3)
        kernel.apply_x(state, 3, 2)
        kernel.apply_cx(state, 3, 2, 0)
        self.assertAlmostEqual(abs(state[0b101]), 1.0)

    def test_cx_is_noop_when_control_clear(self) -> None:
        """Test CX leaves states with a clear control untouched."""
        state = kernel.zero_state(3)
        kernel.apply_x(state, 3, 0)
        kernel.apply_cx(state, 3, 1, 0)
        self.assertAlmostEqual(abs(state[0b001]), 1.0)

    def test_marginal_sums_unmeasured_qubits(self) -> None:
        """Test marginal probabilities sum over unmeasured qubits."""
        state = kernel.zero_state(2)
        kernel.apply_matrix(state, 2, 1, np.array([[1, 1], [1, -1]]) / math.sqrt(2))
        probs = kernel.marginal_probabilities(state, 2, [0])
        np.testing.assert_allclose(probs, [1.0, 0.0], atol=1e-12)

    def test_batched_columns(self) -> None:
        """Test gates act on every column of a 2-D array."""
        block = np.eye(4, dtype=complex)
        kernel.apply_x(block, 2, 0)
        expected = np.array([[0, 1, 0, 0], [1, 0, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]])
        np.testing.assert_allclose(block, expected)


class StateModelTest(SimpleTestCase):
    """Test cases for simulator value types."""

    def test_amplitude_length_checked(self) -> None:
        """Test state vectors need 2^n amplitudes."""
        with self.assertRaises(SimulationError):
            StateVector(2, np.zeros(3, dtype=complex))

    def test_noise_probability_bounds(self) -> None:
        """Test p_correct must lie in (0, 1]."""
        with self.assertRaises(SimulationError):
            NoiseModel(0.0)
        with self.assertRaises(SimulationError):
            NoiseModel(1.5)
        self.assertEqual(NoiseModel(1.0, 'depolarizing').channel, NoiseChannel.DEPOLARIZING)

    def test_counts_must_sum_to_shots(self) -> None:
        """Test counts tables reject totals that differ from shots."""
        with self.assertRaises(SimulationError):
            CountsTable(shots=10, counts={'0': 4, '1': 5})

    def test_counts_keys_are_binary(self) -> None:
        """Test counts keys must be equal-width bitstrings."""
        with self.assertRaises(SimulationError):
            CountsTable(shots=2, counts={'0': 1, '2': 1})
        with self.assertRaises(SimulationError):
            CountsTable(shots=2, counts={'0': 1, '10': 1})

    def test_counts_document(self) -> None:
        """Test the counts JSON document keeps the published keys."""
        table = CountsTable(shots=3, counts={'1': 2, '0': 1}, seed=7, circuit_name='c')
        document = table.to_dict()
        self.assertEqual(
            set(document), {'backend', 'date', 'shots', 'seed', 'counts', 'circuit_name'}
        )
        self.assertEqual(list(document['counts']), ['0', '1'])
        self.assertEqual(CountsTable.from_dict(document), table)


class ApplyGateTest(SimpleTestCase):
    """Test cases for single gate application."""

    def setUp(self) -> None:
        """Set up test data."""
        self.service = SimulatorService()

    def test_hadamard_on_zero(self) -> None:
        """Test H|0> is the equal superposition."""
        state = self.service.apply_gate(StateVector.zero(1), Gate.single(GateKind.H, 0))
        np.testing.assert_allclose(state.amplitudes, [1 / math.sqrt(2), 1 / math.sqrt(2)])

    def test_x_is_an_involution(self) -> None:
        """Test X;X restores any state."""
        rng = np.random.default_rng(3)
        raw = rng.normal(size=8) + 1j * rng.normal(size=8)
        start = StateVector(3, raw / np.linalg.norm(raw))
        once = self.service.apply_gate(start, Gate.single(GateKind.X, 1))
        twice = self.service.apply_gate(once, Gate.single(GateKind.X, 1))
        np.testing.assert_allclose(twice.amplitudes, start.amplitudes)
        self.assertFalse(np.allclose(once.amplitudes, start.amplitudes))

    def test_cx_within_five_qubits(self) -> None:
        """Test CX(1,2) maps |q1=1, q2=0> to |q1=1, q2=1>."""
        state = self.service.apply_gate(StateVector.zero(5), Gate.single(GateKind.X, 1))
        state = self.service.apply_gate(state, Gate.cx(1, 2))
        self.assertAlmostEqual(abs(state.amplitude('00110')), 1.0)

    def test_input_state_untouched(self) -> None:
        """Test apply_gate returns a new state."""
        start = StateVector.zero(1)
        self.service.apply_gate(start, Gate.single(GateKind.X, 0))
        self.assertEqual(start.amplitudes[0], 1.0)

    def test_rejects_measure_and_range(self) -> None:
        """Test non-unitary gates and foreign qubits are rejected."""
        with self.assertRaises(SimulationError):
            self.service.apply_gate(StateVector.zero(1), Gate.measure(0, 0))
        with self.assertRaises(SimulationError):
            self.service.apply_gate(StateVector.zero(1), Gate.single(GateKind.H, 1))

    def test_norm_preserved_on_random_circuit(self) -> None:
        """Test the norm stays within 1e-12 after each gate."""
        rng = np.random.default_rng(11)
        kinds = [GateKind.H, GateKind.T, GateKind.S, GateKind.Y, GateKind.SDG]
        state = StateVector.zero(6)
        for _ in range(200):
            if rng.random() < 0.3:
                a, b = rng.choice(6, size=2, replace=False)
                gate = Gate.cx(int(a), int(b))
            elif rng.random() < 0.5:
                gate = Gate.u1(float(rng.uniform(-math.pi, math.pi)), int(rng.integers(6)))
            else:
                gate = Gate.single(kinds[int(rng.integers(len(kinds)))], int(rng.integers(6)))
            state = self.service.apply_gate(state, gate)
            self.assertLess(state.norm_error, 1e-12)

    def test_diagonal_gates_keep_magnitudes(self) -> None:
        """Test U1, Z, S and T only change phases."""
        rng = np.random.default_rng(5)
        raw = rng.normal(size=16) + 1j * rng.normal(size=16)
        start = StateVector(4, raw / np.linalg.norm(raw))
        for gate in (Gate.u1(0.7, 2), Gate.single(GateKind.Z, 0),
                     Gate.single(GateKind.S, 3), Gate.single(GateKind.T, 1)):
            result = self.service.apply_gate(start, gate)
            np.testing.assert_allclose(np.abs(result.amplitudes), np.abs(start.amplitudes))


class RunExactTest(SimpleTestCase):
    """Test cases for exact distributions."""

    def setUp(self) -> None:
        """Set up test data."""
        self.service = SimulatorService()

    def test_singlet_at_equal_angles(self) -> None:
        """Test the singlet gives only anti-correlated outcomes at theta=0."""
        gates = [
            Gate.single(GateKind.X, 0), Gate.single(GateKind.X, 1),
            Gate.single(GateKind.H, 0), Gate.cx(0, 1),
            Gate.single(GateKind.H, 0), Gate.u1(0.0, 0), Gate.single(GateKind.H, 0),
            Gate.single(GateKind.H, 1), Gate.u1(0.0, 1), Gate.single(GateKind.H, 1),
        ]
        probs = self.service.run_exact(measure_all(2, gates))
        self.assertAlmostEqual(probs['01'], 0.5)
        self.assertAlmostEqual(probs['10'], 0.5)
        self.assertNotIn('00', probs)
        self.assertNotIn('11', probs)

    def test_partial_measurement_marginalises(self) -> None:
        """Test unmeasured qubits are summed out."""
        circuit = Circuit(3, 1, (
            Gate.single(GateKind.H, 0), Gate.single(GateKind.X, 2), Gate.measure(2, 0),
        ))
        probs = self.service.run_exact(circuit)
        self.assertEqual(set(probs), {'1'})
        for key, expected in {'1': 1.0}.items():
            self.assertAlmostEqual(probs[key], expected, places=12)

    def test_clbit_order(self) -> None:
        """Test classical bit 0 is the rightmost character."""
        circuit = Circuit(2, 2, (
            Gate.single(GateKind.X, 0), Gate.measure(0, 1), Gate.measure(1, 0),
        ))
        self.assertEqual(self.service.run_exact(circuit), {'10': 1.0})

    def test_probabilities_sum_to_one(self) -> None:
        """Test distributions are normalised."""
        gates = [Gate.single(GateKind.H, q) for q in range(4)] + [Gate.cx(0, 3), Gate.u1(0.4, 3)]
        probs = self.service.run_exact(measure_all(4, gates))
        self.assertAlmostEqual(sum(probs.values()), 1.0, places=12)

    def test_requires_measurement(self) -> None:
        """Test circuits without measurement are rejected."""
        with self.assertRaises(SimulationError):
            self.service.run_exact(Circuit(1, 0, (Gate.single(GateKind.H, 0),)))


class SampleTest(SimpleTestCase):
    """Test cases for shot sampling."""

    def setUp(self) -> None:
        """Set up test data."""
        self.service = SimulatorService()

    def test_deterministic_circuit(self) -> None:
        """Test X then measure yields a single key."""
        table = self.service.sample(measure_all(1, [Gate.single(GateKind.X, 0)]), SHOTS, seed=42)
        self.assertEqual(table.counts, {'1': SHOTS})

    def test_hadamard_within_five_standard_errors(self) -> None:
        """Test H then measure gives frequencies near one half."""
        table = self.service.sample(measure_all(1, [Gate.single(GateKind.H, 0)]), SHOTS, seed=1)
        for key in ('0', '1'):
            self.assertLess(abs(table.counts[key] / SHOTS - 0.5), FIVE_SE)

    def test_same_seed_same_table(self) -> None:
        """Test identical inputs give identical counts."""
        circuit = measure_all(3, [Gate.single(GateKind.H, q) for q in range(3)])
        first = self.service.sample(circuit, 5000, seed=9)
        second = self.service.sample(circuit, 5000, seed=9)
        self.assertEqual(first.counts, second.counts)
        self.assertEqual(first.seed, 9)

    def test_blocks_are_independent(self) -> None:
        """Test each block draws from its own child stream."""
        streams = list(shot_streams(4, 2500, 1000))
        self.assertEqual([size for size, _ in streams], [1000, 1000, 500])
        replay = list(shot_streams(4, 2500, 1000))
        self.assertEqual(streams[2][1].random(), replay[2][1].random())
        self.assertNotEqual(streams[0][1].random(), streams[1][1].random())

    def test_frequencies_converge(self) -> None:
        """Test every outcome lies within 5 SE of its exact probability."""
        gates = [Gate.single(GateKind.H, 0), Gate.cx(0, 1), Gate.u1(1.1, 1), Gate.single(GateKind.H, 1)]
        circuit = measure_all(2, gates)
        exact = self.service.run_exact(circuit)
        table = self.service.sample(circuit, SHOTS, seed=2)
        for key, p in exact.items():
            self.assertLess(abs(table.counts.get(key, 0) / SHOTS - p), FIVE_SE)

    def test_zero_shots_rejected(self) -> None:
        """Test shots must be positive."""
        with self.assertRaises(SimulationError):
            self.service.sample(measure_all(1, []), 0, seed=1)

    def test_twenty_qubits_two_hundred_gates(self) -> None:
        """Test a 20-qubit, 200-gate circuit runs in seconds."""
        gates = []
        for layer in range(10):
            gates.extend(Gate.single(GateKind.H, q) for q in range(10))
            gates.extend(Gate.cx(q, (q + layer + 1) % 20) for q in range(10))
        circuit = measure_all(20, gates)
        started = time.perf_counter()
        table = self.service.sample(circuit, 1024, seed=3)
        self.assertLess(time.perf_counter() - started, 30.0)
        self.assertEqual(table.shots, 1024)


class UnitaryTest(SimpleTestCase):
    """Test cases for unitary extraction."""

    def setUp(self) -> None:
        """Set up test data."""
        self.service = SimulatorService()

    def test_empty_circuit_is_identity(self) -> None:
        """Test an empty circuit gives the identity."""
        np.testing.assert_allclose(self.service.unitary_of(Circuit(1, 0)), np.eye(2))

    def test_double_cx_is_identity(self) -> None:
        """Test CX;CX cancels."""
        circuit = Circuit(2, 0, (Gate.cx(0, 1), Gate.cx(0, 1)))
        np.testing.assert_allclose(self.service.unitary_of(circuit), np.eye(4))

    def test_controlled_z_from_cx(self) -> None:
        """Test H_j CX_ij H_j is diag(1,1,1,-1)."""
        circuit = Circuit(2, 0, (Gate.single(GateKind.H, 1), Gate.cx(0, 1), Gate.single(GateKind.H, 1)))
        np.testing.assert_allclose(
            self.service.unitary_of(circuit), np.diag([1, 1, 1, -1]), atol=1e-12
        )

    def test_result_is_unitary(self) -> None:
        """Test U^dagger U is the identity."""
        circuit = Circuit(3, 0, (
            Gate.single(GateKind.H, 0), Gate.cx(0, 2), Gate.single(GateKind.T, 2),
            Gate.cx(2, 1), Gate.u1(0.3, 1), Gate.single(GateKind.SDG, 0),
        ))
        matrix = self.service.unitary_of(circuit)
        self.assertLess(np.max(np.abs(matrix.conj().T @ matrix - np.eye(8))), 1e-10)

    def test_rejects_measurement(self) -> None:
        """Test circuits with measurements are rejected."""
        with self.assertRaises(SimulationError):
            self.service.unitary_of(measure_all(1, []))

    def test_rejects_wide_circuits(self) -> None:
        """Test the qubit limit is enforced."""
        with self.assertRaises(SimulationError):
            self.service.unitary_of(Circuit(11, 0))


class RunNoisyTest(SimpleTestCase):
    """Test cases for the per-gate error channel."""

    def setUp(self) -> None:
        """Set up test data."""
        self.service = SimulatorService()
        self.x_chain = measure_all(1, [Gate.single(GateKind.X, 0)] * 20, name='x-chain')

    def test_perfect_gates_match_sample(self) -> None:
        """Test p_correct = 1 reproduces ideal sampling."""
        circuit = measure_all(2, [Gate.single(GateKind.H, 0), Gate.cx(0, 1)])
        noisy = self.service.run_noisy(circuit, NoiseModel(1.0), SHOTS, seed=5)
        ideal = self.service.sample(circuit, SHOTS, seed=5)
        self.assertEqual(noisy.counts, ideal.counts)
        self.assertEqual(noisy.metadata['error_free_shots'], SHOTS)

    def test_error_free_fraction_follows_gate_count(self) -> None:
        """Test 20 gates at p=0.95 leave about 0.36 of shots untouched."""
        table = self.service.run_noisy(self.x_chain, NoiseModel(0.95), SHOTS, seed=1)
        fraction = table.metadata['error_free_shots'] / SHOTS
        self.assertLess(abs(fraction - 0.95 ** 20), FIVE_SE)
        self.assertAlmostEqual(0.95 ** 20, 0.3585, places=4)

    def test_bit_flip_chain_outcome(self) -> None:
        """Test the correct outcome of an X-chain follows the parity of flips."""
        table = self.service.run_noisy(self.x_chain, NoiseModel(0.95), SHOTS, seed=1)
        expected = (1 + (2 * 0.95 - 1) ** 20) / 2
        self.assertLess(abs(table.counts.get('0', 0) / SHOTS - expected), FIVE_SE)

    def test_single_gate_at_half(self) -> None:
        """Test one gate at p=0.5 is right half the time."""
        circuit = measure_all(1, [Gate.single(GateKind.X, 0)])
        table = self.service.run_noisy(circuit, NoiseModel(0.5), SHOTS, seed=8)
        self.assertLess(abs(table.counts.get('1', 0) / SHOTS - 0.5), FIVE_SE)

    def test_depolarizing_is_deterministic(self) -> None:
        """Test the depolarizing channel is reproducible per seed."""
        circuit = measure_all(2, [Gate.single(GateKind.H, 0), Gate.cx(0, 1)])
        noise = NoiseModel(0.9, NoiseChannel.DEPOLARIZING)
        first = self.service.run_noisy(circuit, noise, 3000, seed=12)
        second = self.service.run_noisy(circuit, noise, 3000, seed=12)
        self.assertEqual(first.counts, second.counts)
        self.assertEqual(first.backend, 'noisy')
        self.assertEqual(first.metadata['channel'], 'depolarizing')

    def test_cx_errors_hit_both_qubits(self) -> None:
        """Test a noisy CX can corrupt its control as well as its target."""
        circuit = measure_all(2, [Gate.cx(0, 1)])
        table = self.service.run_noisy(circuit, NoiseModel(0.5), 4000, seed=6)
        self.assertEqual(set(table.counts), {'00', '01', '10', '11'})
