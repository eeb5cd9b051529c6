"""
Unit tests for circuits app.
"""

import json
import tempfile
from pathlib import Path

from django.test import SimpleTestCase

from .exceptions import CircuitError
from .models import Circuit, CodeSpec, CouplingMap, DeviceProfile, Gate, GateKind
from .services import CircuitService


class GateModelTest(SimpleTestCase):
    """Test cases for Gate model."""

    def test_cx_self_pair_rejected(self) -> None:
        """Test CX with equal control and target is rejected."""
        with self.assertRaises(CircuitError):
            Gate.cx(0, 0)

    def test_u1_requires_finite_angle(self) -> None:
        """Test U1 rejects non-finite angles."""
        with self.assertRaises(CircuitError):
            Gate.u1(float('nan'), 0)
        with self.assertRaises(CircuitError):
            Gate.u1(float('inf'), 0)

    def test_kind_accepts_plain_strings(self) -> None:
        """Test gate kind is normalised from its string value."""
        gate = Gate('h', (1,))
        self.assertEqual(gate.kind, GateKind.H)
        self.assertEqual(gate, Gate.single(GateKind.H, 1))

    def test_angle_only_on_u1(self) -> None:
        """Test non-U1 gates reject an angle."""
        with self.assertRaises(CircuitError):
            Gate(GateKind.H, (0,), angle=0.5)


class CircuitModelTest(SimpleTestCase):
    """Test cases for Circuit model."""

    def test_gate_after_measure_rejected(self) -> None:
        """Test a gate on an already measured qubit is rejected."""
        with self.assertRaises(CircuitError):
            Circuit(1, 1, (Gate.measure(0, 0), Gate.single(GateKind.X, 0)))

    def test_barrier_after_measure_allowed(self) -> None:
        """Test barriers may follow measurements."""
        circuit = Circuit(1, 1, (Gate.measure(0, 0), Gate.barrier(0)))
        self.assertEqual(len(circuit), 2)

    def test_measured_clbits_in_bitstring_order(self) -> None:
        """Test measured classical bits are listed highest first."""
        circuit = Circuit(3, 3, (Gate.measure(0, 0), Gate.measure(2, 2)))
        self.assertEqual(circuit.measured_clbits, [2, 0])

    def test_census(self) -> None:
        """Test gate census counts per kind."""
        circuit = Circuit(2, 0, (Gate.single(GateKind.H, 0), Gate.single(GateKind.H, 1), Gate.cx(0, 1)))
        self.assertEqual(circuit.census(), {'h': 2, 'cx': 1})


class DeviceModelTest(SimpleTestCase):
    """Test cases for coupling maps, device profiles and code specs."""

    def test_coupling_self_pair_rejected(self) -> None:
        """Test coupling maps reject self-pairs."""
        with self.assertRaises(CircuitError):
            CouplingMap.from_pairs(3, [(1, 1)])

    def test_coupling_index_range(self) -> None:
        """Test coupling maps reject out-of-range indices."""
        with self.assertRaises(CircuitError):
            CouplingMap.from_pairs(3, [(0, 3)])

    def test_profile_values_positive(self) -> None:
        """Test device profiles require positive values."""
        with self.assertRaises(CircuitError):
            DeviceProfile('bad', 0.0, 650e-9, 100e-6)

    def test_code_spec_bounds(self) -> None:
        """Test [[m,k,d]] requires k < m and d >= 1."""
        self.assertEqual(str(CodeSpec(5, 1, 3)), '[[5,1,3]]')
        with self.assertRaises(CircuitError):
            CodeSpec(5, 5, 3)
        with self.assertRaises(CircuitError):
            CodeSpec(5, 1, 0)


class CircuitServiceTest(SimpleTestCase):
    """Test cases for CircuitService."""

    def setUp(self) -> None:
        """Set up test data."""
        self.service = CircuitService()
        self.coupling_v1, self.profile_v1 = self.service.load_device('ibmqe-v1')

    def test_append_to_empty_circuit(self) -> None:
        """Test appending X(0) to an empty circuit."""
        circuit = self.service.append_gate(Circuit(1, 1), Gate.single(GateKind.X, 0))
        self.assertEqual(len(circuit), 1)

    def test_append_preserves_order(self) -> None:
        """Test appended gates keep their order and the original is untouched."""
        base = Circuit(2, 2)
        first = self.service.append_gate(base, Gate.single(GateKind.H, 0))
        second = self.service.append_gate(first, Gate.cx(0, 1))
        self.assertEqual(len(base), 0)
        self.assertEqual([g.kind for g in second.gates], [GateKind.H, GateKind.CX])

    def test_append_out_of_range(self) -> None:
        """Test appending a gate outside the register fails."""
        with self.assertRaises(CircuitError):
            self.service.append_gate(Circuit(2, 2), Gate.single(GateKind.X, 2))

    def test_append_measure_last_qubit(self) -> None:
        """Test Measure(4,4) on a 5-qubit, 5-bit circuit is valid."""
        circuit = self.service.append_gate(Circuit(5, 5), Gate.measure(4, 4))
        self.assertEqual(circuit.gates[-1].clbit, 4)

    def test_validate_coupling_allowed_pair(self) -> None:
        """Test CX(1,2) is legal on the original star device."""
        circuit = Circuit(5, 0, (Gate.cx(1, 2),))
        self.assertEqual(self.service.validate_coupling(circuit, self.coupling_v1), [])

    def test_validate_coupling_reversed_pair(self) -> None:
        """Test CX(2,1) is one violation on the star device."""
        circuit = Circuit(5, 0, (Gate.cx(2, 1),))
        violations = self.service.validate_coupling(circuit, self.coupling_v1)
        self.assertEqual(len(violations), 1)
        self.assertEqual((violations[0].control, violations[0].target), (2, 1))

    def test_validate_coupling_without_cx(self) -> None:
        """Test circuits without CX have no violations."""
        circuit = Circuit(5, 0, (Gate.single(GateKind.H, 0),))
        self.assertEqual(self.service.validate_coupling(circuit, self.coupling_v1), [])

    def test_validate_coupling_size_mismatch(self) -> None:
        """Test mismatched qubit counts are rejected."""
        with self.assertRaises(CircuitError):
            self.service.validate_coupling(Circuit(3, 0), self.coupling_v1)

    def test_second_device_adds_pairs(self) -> None:
        """Test the revised device adds (0,1) and (3,4)."""
        coupling_v2, _ = self.service.load_device('ibmqe-v2')
        self.assertTrue(coupling_v2.allows(0, 1))
        self.assertTrue(coupling_v2.allows(3, 4))
        self.assertFalse(self.coupling_v1.allows(0, 1))

    def test_duration_of_empty_circuit(self) -> None:
        """Test an empty circuit takes no time."""
        estimate = self.service.estimate_duration(Circuit(5, 5), self.profile_v1)
        self.assertEqual(estimate.seconds, 0.0)
        self.assertFalse(estimate.exceeds_coherence)

    def test_duration_of_twelve_cnots(self) -> None:
        """Test 12 CX gates take 7.8 microseconds."""
        circuit = Circuit(5, 0, tuple(Gate.cx(0, 2) for _ in range(12)))
        estimate = self.service.estimate_duration(circuit, self.profile_v1)
        self.assertAlmostEqual(estimate.seconds, 7.8e-6, places=12)

    def test_duration_ignores_barrier_and_measure(self) -> None:
        """Test barriers and measurements contribute zero."""
        circuit = Circuit(1, 1, (Gate.single(GateKind.X, 0), Gate.barrier(0), Gate.measure(0, 0)))
        estimate = self.service.estimate_duration(circuit, self.profile_v1)
        self.assertAlmostEqual(estimate.seconds, 130e-9, places=15)
        self.assertEqual(estimate.gate_count, 1)

    def test_duration_is_additive(self) -> None:
        """Test duration of a concatenation is the sum of both parts."""
        first = Circuit(5, 0, (Gate.single(GateKind.H, 0), Gate.cx(0, 2)))
        second = Circuit(5, 0, (Gate.u1(0.3, 1), Gate.cx(1, 2), Gate.cx(3, 2)))
        total = self.service.estimate_duration(first.concat(second), self.profile_v1).seconds
        parts = (self.service.estimate_duration(first, self.profile_v1).seconds
                 + self.service.estimate_duration(second, self.profile_v1).seconds)
        self.assertAlmostEqual(total, parts, places=15)

    def test_duration_flags_limits(self) -> None:
        """Test long circuits are flagged against coherence and gate limits."""
        circuit = Circuit(5, 0, tuple(Gate.cx(0, 2) for _ in range(200)))
        estimate = self.service.estimate_duration(circuit, self.profile_v1)
        self.assertTrue(estimate.exceeds_coherence)
        self.assertTrue(estimate.exceeds_max_gates)

    def test_load_device_from_file(self) -> None:
        """Test a device description loads from a JSON file."""
        document = {
            'num_qubits': 3, 'allowed': [[0, 1], [1, 2]],
            'duration_1q_ns': 100, 'duration_cx_ns': 500,
            'coherence_us': 50, 'max_gates': 40,
        }
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / 'line.json'
            path.write_text(json.dumps(document), encoding='utf-8')
            coupling, profile = self.service.load_device(path)
        self.assertTrue(coupling.allows(1, 2))
        self.assertAlmostEqual(profile.duration_cx, 500e-9)
        self.assertEqual(profile.max_gates, 40)
        self.assertEqual(profile.name, 'line')

    def test_load_device_missing_key(self) -> None:
        """Test an incomplete device document is rejected."""
        with self.assertRaises(CircuitError):
            self.service.parse_device({'num_qubits': 5})
