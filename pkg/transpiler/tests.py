"""
Unit tests for transpiler app.
"""

import random
from typing import List

import numpy as np
from django.test import SimpleTestCase

from circuits.exceptions import CircuitError
from circuits.models import Circuit, CouplingMap, Gate, GateKind
from circuits.services import CircuitService
from simulator.exceptions import SimulationError
from simulator.services import SimulatorService

from .equivalence import aligned_distance
from .exceptions import UnroutableError, VerificationError
from .models import Layout, RewriteRule
from .rules import (
    CMINUSZ, CX, CY, CZ, REGISTRY, SWAP,
    expand_cminusz, expand_cy, expand_cz, expand_swap, register, reverse_cnot,
)
from .services import TranspilerService


def two_qubit(gates: List[Gate]) -> Circuit:
    return Circuit(2, 0, tuple(gates))


def prepared(bits: str, gates: List[Gate]) -> np.ndarray:
    """Final state of ``gates`` applied to the basis state written q1 q0."""
    prep = [Gate.single(GateKind.X, q) for q, bit in enumerate(reversed(bits)) if bit == '1']
    return SimulatorService().final_state(two_qubit(prep + gates)).amplitudes


class RewriteRuleTest(SimpleTestCase):
    """Test cases for the two-qubit identities."""

    def setUp(self) -> None:
        """Set up test data."""
        self.simulator = SimulatorService()

    def unitary(self, gates: List[Gate]) -> np.ndarray:
        return self.simulator.unitary_of(two_qubit(gates))

    def test_cz_matrix(self) -> None:
        """Test H_j C_ij H_j is diag(1,1,1,-1)."""
        np.testing.assert_allclose(self.unitary(expand_cz(0, 1)), CZ, atol=1e-12)

    def test_cz_symmetric(self) -> None:
        """Test CZ does not depend on which operand controls."""
        np.testing.assert_allclose(self.unitary(expand_cz(0, 1)), self.unitary(expand_cz(1, 0)), atol=1e-12)

    def test_cz_on_eleven(self) -> None:
        """Test CZ negates |11>."""
        np.testing.assert_allclose(prepared('11', expand_cz(0, 1))[3], -1.0, atol=1e-12)

    def test_cminusz(self) -> None:
        """Test controlled minus Z matrix and its action on basis states."""
        np.testing.assert_allclose(self.unitary(expand_cminusz(0, 1)), CMINUSZ, atol=1e-12)
        np.testing.assert_allclose(prepared('00', expand_cminusz(0, 1))[0], 1.0, atol=1e-12)
        # control (qubit 0) on, target off
        np.testing.assert_allclose(prepared('01', expand_cminusz(0, 1))[1], -1.0, atol=1e-12)

    def test_cy(self) -> None:
        """Test H_j C_ij H_j C_ij S_i is controlled Y."""
        self.assertLess(aligned_distance(CY, self.unitary(expand_cy(0, 1))), 1e-10)
        np.testing.assert_allclose(prepared('10', expand_cy(0, 1))[2], 1.0, atol=1e-12)
        np.testing.assert_allclose(prepared('01', expand_cy(0, 1))[3], 1j, atol=1e-12)

    def test_reverse_cnot(self) -> None:
        """Test the Hadamard-conjugated CX equals the original direction."""
        np.testing.assert_allclose(self.unitary(reverse_cnot(0, 1)), CX, atol=1e-12)
        np.testing.assert_allclose(self.unitary(reverse_cnot(0, 1) * 2), np.eye(4), atol=1e-12)
        np.testing.assert_allclose(abs(prepared('01', reverse_cnot(0, 1))[3]), 1.0, atol=1e-12)

    def test_swap(self) -> None:
        """Test three CX exchange the two qubits."""
        np.testing.assert_allclose(self.unitary(expand_swap(0, 1)), SWAP)
        np.testing.assert_allclose(self.unitary(expand_swap(0, 1) * 2), np.eye(4))
        np.testing.assert_allclose(abs(prepared('01', expand_swap(0, 1))[2]), 1.0)

    def test_equal_operands_rejected(self) -> None:
        """Test rewrites need two distinct qubits."""
        for rule in (expand_cz, expand_cminusz, expand_cy, reverse_cnot, expand_swap):
            with self.assertRaises(CircuitError):
                rule(1, 1)

    def test_builtin_rules_registered(self) -> None:
        """Test every built-in identity passed registration."""
        self.assertEqual(set(REGISTRY), {'cz', 'cminusz', 'cy', 'reverse_cnot', 'swap'})
        self.assertEqual(REGISTRY['cz'](3, 4), expand_cz(3, 4))

    def test_wrong_rule_refused(self) -> None:
        """Test a rule that misses its target is not registered."""
        with self.assertRaises(VerificationError):
            register(RewriteRule('bogus', CZ, expand_swap))
        self.assertNotIn('bogus', REGISTRY)


class LayoutTest(SimpleTestCase):
    """Test cases for Layout."""

    def test_must_be_permutation(self) -> None:
        """Test layouts are bijective."""
        with self.assertRaises(CircuitError):
            Layout((0, 0, 1))

    def test_swapped(self) -> None:
        """Test swapping physical qubits moves their logical contents."""
        layout = Layout.identity(3).swapped(0, 2)
        self.assertEqual(layout.physical, (2, 1, 0))
        self.assertEqual(layout.logical_at(2), 0)
        self.assertFalse(layout.is_identity)

    def test_basis_permutation(self) -> None:
        """Test logical bit 0 moves to physical position 2."""
        layout = Layout((2, 1, 0))
        self.assertEqual(int(layout.basis_permutation()[0b001]), 0b100)


class RouteTest(SimpleTestCase):
    """Test cases for TranspilerService.route."""

    def setUp(self) -> None:
        """Set up test data."""
        self.service = TranspilerService()
        self.circuits = CircuitService()
        self.star, _ = self.circuits.load_device('ibmqe-v1')

    def assert_legal_and_equivalent(self, circuit: Circuit) -> None:
        routed, layout = self.service.route(circuit, self.star)
        self.assertEqual(self.circuits.validate_coupling(routed, self.star), [])
        self.assertTrue(self.service.verify_equivalence(circuit, routed, layout))

    def test_reversed_pair(self) -> None:
        """Test CX(2,1) becomes the Hadamard-conjugated CX(1,2)."""
        circuit = Circuit(5, 0, (Gate.cx(2, 1),))
        result = self.service.route(circuit, self.star)
        self.assertTrue(result.layout.is_identity)
        self.assertEqual(list(result.circuit.gates), reverse_cnot(2, 1))
        self.assertEqual(result.metadata['added_h'], 4)
        self.assert_legal_and_equivalent(circuit)

    def test_uncoupled_pair(self) -> None:
        """Test CX(0,1) is routed through qubit 2 with a SWAP."""
        circuit = Circuit(5, 0, (Gate.cx(0, 1),))
        result = self.service.route(circuit, self.star)
        self.assertEqual(result.layout.physical, (2, 1, 0, 3, 4))
        self.assertEqual(result.metadata['swaps'], 1)
        self.assertEqual(result.metadata['added_cx'], 3)
        self.assert_legal_and_equivalent(circuit)

    def test_legal_circuit_unchanged(self) -> None:
        """Test circuits that already fit are returned as-is."""
        circuit = Circuit(5, 0, (Gate.single(GateKind.H, 0), Gate.cx(0, 2), Gate.cx(4, 2)))
        routed, layout = self.service.route(circuit, self.star)
        self.assertEqual(routed, circuit)
        self.assertTrue(layout.is_identity)

    def test_idempotent(self) -> None:
        """Test routing a routed circuit adds nothing."""
        circuit = Circuit(5, 0, (Gate.cx(0, 1), Gate.cx(3, 4), Gate.cx(2, 0)))
        once, _ = self.service.route(circuit, self.star)
        twice, layout = self.service.route(once, self.star)
        self.assertEqual(twice.gates, once.gates)
        self.assertTrue(layout.is_identity)

    def test_barrier_stays_in_place(self) -> None:
        """Test gates on either side of a barrier stay on that side."""
        circuit = Circuit(5, 0, (Gate.cx(2, 1), Gate.barrier(0, 1, 2), Gate.cx(0, 1)))
        routed, _ = self.service.route(circuit, self.star)
        barrier_at = next(i for i, g in enumerate(routed.gates) if g.kind == GateKind.BARRIER)
        self.assertEqual(barrier_at, len(reverse_cnot(2, 1)))

    def test_restore_layout(self) -> None:
        """Test restore_layout returns every qubit home."""
        circuit = Circuit(5, 0, (Gate.cx(0, 1), Gate.cx(3, 0)))
        result = self.service.route(circuit, self.star, restore_layout=True)
        self.assertTrue(result.layout.is_identity)
        self.assertTrue(self.service.verify_equivalence(circuit, result.circuit))

    def test_measurements_follow_layout(self) -> None:
        """Test routed circuits give the same outcome distribution."""
        gates = [Gate.single(GateKind.H, 0), Gate.cx(0, 1), Gate.single(GateKind.X, 3), Gate.cx(3, 4)]
        circuit = Circuit(5, 5, tuple(gates + [Gate.measure(q, q) for q in range(5)]))
        routed, _ = self.service.route(circuit, self.star)
        simulator = SimulatorService()
        exact, after = simulator.run_exact(circuit), simulator.run_exact(routed)
        self.assertEqual(set(exact), set(after))
        for key, p in exact.items():
            self.assertAlmostEqual(after[key], p, places=12)

    def test_random_circuits(self) -> None:
        """Test random circuits route to equivalent legal circuits."""
        rng = random.Random(8)
        for _ in range(20):
            gates = []
            for _ in range(15):
                if rng.random() < 0.5:
                    control, target = rng.sample(range(5), 2)
                    gates.append(Gate.cx(control, target))
                else:
                    gates.append(Gate.single(rng.choice([GateKind.H, GateKind.T, GateKind.S]), rng.randrange(5)))
            self.assert_legal_and_equivalent(Circuit(5, 0, tuple(gates)))

    def test_unroutable(self) -> None:
        """Test disconnected qubits cannot be routed."""
        coupling = CouplingMap.from_pairs(3, [(0, 1)])
        with self.assertRaises(UnroutableError):
            self.service.route(Circuit(3, 0, (Gate.cx(0, 2),)), coupling)

    def test_size_mismatch(self) -> None:
        """Test the circuit must match the device width."""
        with self.assertRaises(CircuitError):
            self.service.route(Circuit(2, 0, (Gate.cx(0, 1),)), self.star)


class VerifyEquivalenceTest(SimpleTestCase):
    """Test cases for TranspilerService.verify_equivalence."""

    def setUp(self) -> None:
        """Set up test data."""
        self.service = TranspilerService()

    def test_self_equivalence(self) -> None:
        """Test a circuit is equivalent to itself at tight tolerance."""
        circuit = Circuit(3, 0, (Gate.single(GateKind.H, 0), Gate.cx(0, 2), Gate.u1(0.3, 1)))
        self.assertTrue(self.service.verify_equivalence(circuit, circuit, tolerance=1e-12))

    def test_reverse_cnot_equivalent(self) -> None:
        """Test CX matches its reversed expansion."""
        self.assertTrue(self.service.verify_equivalence(
            two_qubit([Gate.cx(0, 1)]), two_qubit(reverse_cnot(0, 1)),
        ))

    def test_global_phase_ignored(self) -> None:
        """Test circuits differing by a global phase are equivalent."""
        first = two_qubit([Gate.single(GateKind.Z, 0), Gate.single(GateKind.X, 0),
                           Gate.single(GateKind.Z, 0), Gate.single(GateKind.X, 0)])
        self.assertTrue(self.service.verify_equivalence(first, two_qubit([])))

    def test_cx_is_not_cz(self) -> None:
        """Test CX and CZ differ."""
        self.assertFalse(self.service.verify_equivalence(
            two_qubit([Gate.cx(0, 1)]), two_qubit(expand_cz(0, 1)),
        ))

    def test_size_limits(self) -> None:
        """Test mismatched or oversized circuits are rejected."""
        with self.assertRaises(SimulationError):
            self.service.verify_equivalence(Circuit(2, 0), Circuit(3, 0))
        with self.assertRaises(SimulationError):
            self.service.verify_equivalence(Circuit(11, 0), Circuit(11, 0))
