"""
Unit tests for benchmarks app.
"""

import math
from pathlib import Path

import numpy as np
from django.test import SimpleTestCase

from circuits.models import Circuit, Gate, GateKind
from circuits.services import CircuitService
from qasm.grammar import pi_multiple
from qasm.services import QasmService
from simulator.models import CountsTable
from simulator.services import SimulatorService
from transpiler.services import TranspilerService

from .adder import ADDER_LAYOUTS, SUPERPOSITION_GROUPS, adder_oracle, gen_adder
from .codes import (
    FIVE_QUBIT_CODEWORDS,
    SURFACE_CODEWORDS,
    gen_513_encoder,
    gen_single_qubit_reference,
    gen_surface_code_case,
    logical_513_encoder,
    postselect,
)
from .exceptions import BenchmarkError, DescriptorError
from .identity import IDENTITY_TABLE, gen_identity_sequence, identity_cases, sequence_circuit
from .models import BenchmarkCase, CodeVariant, SingletParams, Suite, canonical_key, display_key
from .services import BenchmarkService, total_variation
from .singlet import correlators_from_frequencies, gen_singlet, singlet_correlators, singlet_grid

LISTINGS = Path(__file__).resolve().parent / 'listings'
SHOTS = 8192
FIVE_SE = 5 / math.sqrt(SHOTS)


class BenchmarkCaseTest(SimpleTestCase):
    """Test cases for BenchmarkCase and column relabelling."""

    def setUp(self) -> None:
        """Set up test data."""
        self.circuit = Circuit(3, 3, (Gate.single(GateKind.X, 2), Gate.measure(0, 0), Gate.measure(2, 2)))

    def test_oracle_must_sum_to_one(self) -> None:
        """Test oracles that do not sum to 1 are rejected."""
        with self.assertRaises(BenchmarkError):
            BenchmarkCase('bad', Suite.IDENTITY, self.circuit, {'10': 0.5})

    def test_oracle_width_matches_measurements(self) -> None:
        """Test oracle keys have one bit per measured qubit."""
        with self.assertRaises(BenchmarkError):
            BenchmarkCase('bad', Suite.IDENTITY, self.circuit, {'100': 1.0})

    def test_default_columns_are_canonical(self) -> None:
        """Test the column map defaults to measured qubits, highest first."""
        case = BenchmarkCase('ok', Suite.IDENTITY, self.circuit, {'10': 1.0})
        self.assertEqual(case.qubit_column_map, (2, 0))
        self.assertEqual(case.display('10'), '10')

    def test_column_map_must_cover_measured(self) -> None:
        """Test a column map naming an unmeasured qubit is rejected."""
        with self.assertRaises(BenchmarkError):
            BenchmarkCase('bad', Suite.IDENTITY, self.circuit, {'10': 1.0}, qubit_column_map=(1, 0))

    def test_display_and_canonical_keys(self) -> None:
        """Test relabelling into the |Q3 Q2 Q0 Q1> order and back."""
        measured, columns = (3, 2, 1, 0), (3, 2, 0, 1)
        self.assertEqual(display_key('0001', measured, columns), '0010')
        self.assertEqual(canonical_key('0010', measured, columns), '0001')


class SingletTest(SimpleTestCase):
    """Test cases for the singlet family."""

    def setUp(self) -> None:
        """Set up test data."""
        self.simulator = SimulatorService()

    def test_gate_census(self) -> None:
        """Test two X, five H, two U1 and one CX."""
        census = gen_singlet(SingletParams(0.3, 1.1)).circuit.census()
        self.assertEqual((census['x'], census['h'], census['u1'], census['cx']), (2, 5, 2, 1))

    def test_matches_listing(self) -> None:
        """Test the generator reproduces the singlet listing."""
        listing = QasmService().load(LISTINGS / 'singlet.qasm')
        case = gen_singlet(SingletParams(pi_multiple(1, 4), pi_multiple(3, 4)))
        self.assertEqual(case.circuit.gates, listing.gates)

    def test_oracle_examples(self) -> None:
        """Test equal angles anticorrelate and orthogonal angles are uniform."""
        equal = gen_singlet(SingletParams(0.7, 0.7)).oracle
        self.assertAlmostEqual(equal['00'], 0.0, places=15)
        self.assertAlmostEqual(equal['01'], 0.5, places=15)
        orthogonal = gen_singlet(SingletParams(0.0, math.pi / 2)).oracle
        for p in orthogonal.values():
            self.assertAlmostEqual(p, 0.25, places=15)

    def test_exact_correlators_on_grid(self) -> None:
        """Test F = -cos(theta1 - theta2) and F1 = F2 = 0 over a 17x17 grid."""
        angles = [k * math.pi / 8 for k in range(17)]
        for theta1 in angles:
            for theta2 in angles:
                case = gen_singlet(SingletParams(theta1, theta2))
                correlators = correlators_from_frequencies(self.simulator.run_exact(case.circuit))
                self.assertLess(abs(correlators.F + math.cos(theta1 - theta2)), 1e-10)
                self.assertLess(abs(correlators.F1), 1e-10)
                self.assertLess(abs(correlators.F2), 1e-10)

    def test_sampled_frequencies_within_five_se(self) -> None:
        """Test sampled frequencies stay within 5 SE of the oracle at 10 grid points."""
        for step in range(10):
            case = gen_singlet(SingletParams(step * math.pi / 8, (step * 3) % 17 * math.pi / 8))
            counts = self.simulator.sample(case.circuit, SHOTS, seed=step)
            for key, p in case.oracle.items():
                self.assertLessEqual(abs(counts.counts.get(key, 0) / SHOTS - p), FIVE_SE)

    def test_correlators_from_counts(self) -> None:
        """Test correlators of uniform, perfectly anticorrelated and hardware-like tables."""
        uniform = CountsTable(400, {'00': 100, '01': 100, '10': 100, '11': 100})
        self.assertEqual(singlet_correlators(uniform).as_tuple(), (0.0, 0.0, 0.0))

        anti = singlet_correlators(CountsTable(2, {'01': 1, '10': 1}))
        self.assertEqual(anti.as_tuple(), (0.0, 0.0, -1.0))

        hardware = singlet_correlators(CountsTable(8000, {'00': 400, '01': 3600, '10': 3600, '11': 400}))
        self.assertAlmostEqual(hardware.F, -0.80, places=12)

    def test_correlators_need_two_bits(self) -> None:
        """Test counts over three bits are rejected."""
        with self.assertRaises(BenchmarkError):
            singlet_correlators(CountsTable(1, {'000': 1}))

    def test_grid_cases(self) -> None:
        """Test both sweeps are generated with distinct names."""
        cases = singlet_grid()
        self.assertEqual(len(cases), 34)
        self.assertEqual(len({case.name for case in cases}), 34)
        self.assertEqual(cases[0].qubit_column_map, (0, 1))


class AdderTest(SimpleTestCase):
    """Test cases for the adder family."""

    def setUp(self) -> None:
        """Set up test data."""
        self.simulator = SimulatorService()

    def test_adder_oracle(self) -> None:
        """Test integer addition modulo 4."""
        self.assertEqual(adder_oracle(2, 3), 1)
        self.assertEqual(adder_oracle(1, 3), 0)
        self.assertEqual(adder_oracle(0, 0), 0)
        with self.assertRaises(BenchmarkError):
            adder_oracle(4, 0)

    def test_all_pairs_exact(self) -> None:
        """Test every input pair gives its sum with probability 1 on both layouts."""
        for layout in ADDER_LAYOUTS:
            for a in range(4):
                for b in range(4):
                    case = gen_adder(a, b, layout=layout)
                    exact = self.simulator.run_exact(case.circuit)
                    top = max(exact, key=lambda k: exact[k])
                    self.assertAlmostEqual(exact[top], 1.0, places=10)
                    shown = case.display(top)
                    self.assertEqual(int(shown[:2], 2), adder_oracle(a, b), msg=(layout, a, b))
                    self.assertEqual(int(shown[3] + shown[2], 2), a)

    def test_one_plus_three(self) -> None:
        """Test 1 + 3 = 0 in the |Q3 Q2 Q0 Q1> column order."""
        case = gen_adder(1, 3)
        self.assertEqual(case.qubit_column_map, (3, 2, 0, 1))
        self.assertEqual([case.display(key) for key in case.oracle], ['0010'])

    def test_matches_listing(self) -> None:
        """Test the generated 1 + 3 circuit is the listing gate for gate."""
        listing = QasmService().load(LISTINGS / 'adder_1_3.qasm')
        self.assertEqual(gen_adder(1, 3).circuit.gates, listing.gates)

    def test_superposition_groups(self) -> None:
        """Test the three superposition groups split as 0.5/0.5, 0.5/0.5 and 4 x 0.25."""
        expected = [[0.5, 0.5], [0.5, 0.5], [0.25] * 4]
        for (a, b, flags), probabilities in zip(SUPERPOSITION_GROUPS, expected):
            case = gen_adder(a, b, superpose=flags)
            exact = self.simulator.run_exact(case.circuit)
            np.testing.assert_allclose(sorted(exact.values()), probabilities, atol=1e-10)
            self.assertLess(total_variation(exact, case.oracle), 1e-10)

    def test_first_bit_superposition_outcomes(self) -> None:
        """Test a in {0, 1}, b = 0 gives 0 + 0 = 0 and 1 + 0 = 1."""
        case = gen_adder(0, 0, superpose={'a0'})
        self.assertEqual({case.display(key) for key in case.oracle}, {'0000', '0110'})

    def test_single_flags_exhaustive(self) -> None:
        """Test every single-bit flag on every input pair matches the mixture oracle."""
        for flag in ('a0', 'a1', 'b0', 'b1', 'a01', 'b01'):
            for a in range(4):
                for b in range(4):
                    case = gen_adder(a, b, superpose={flag})
                    exact = self.simulator.run_exact(case.circuit)
                    self.assertLess(total_variation(exact, case.oracle), 1e-10, msg=(flag, a, b))

    def test_invalid_arguments(self) -> None:
        """Test bad operands, flags and layouts are rejected."""
        with self.assertRaises(BenchmarkError):
            gen_adder(0, 4)
        with self.assertRaises(BenchmarkError):
            gen_adder(0, 0, superpose={'c0'})
        with self.assertRaises(BenchmarkError):
            gen_adder(0, 0, superpose={'a0', 'a01'})
        with self.assertRaises(BenchmarkError):
            gen_adder(0, 0, layout='q2-5')


class IdentityTest(SimpleTestCase):
    """Test cases for the identity-sequence family."""

    def setUp(self) -> None:
        """Set up test data."""
        self.simulator = SimulatorService()

    def test_undressed_sequences_are_identity(self) -> None:
        """Test the bare CX sequences multiply to the identity."""
        for _, descriptor, _ in IDENTITY_TABLE[:4]:
            unitary = self.simulator.unitary_of(sequence_circuit(descriptor))
            np.testing.assert_allclose(unitary, np.eye(32), atol=1e-10)

    def test_dressed_sequence_is_z0_z1(self) -> None:
        """Test the H/X dressing leaves the diagonal Z0 Z1."""
        unitary = self.simulator.unitary_of(sequence_circuit(IDENTITY_TABLE[4][1]))
        signs = [(-1) ** ((x & 1) + ((x >> 1) & 1)) for x in range(32)]
        np.testing.assert_allclose(unitary, np.diag(signs), atol=1e-10)

    def test_table_cases_return_input(self) -> None:
        """Test ideal sampling returns the input state in every shot."""
        for case in identity_cases():
            expected = case.expected_states[0]
            counts = self.simulator.sample(case.circuit, SHOTS, seed=1)
            self.assertEqual(counts.counts, {expected: SHOTS}, msg=case.name)

    def test_expected_states(self) -> None:
        """Test measured qubits and expected outcomes of the table cases."""
        expected = {
            'identity-c01x8-00': '00',
            'identity-c34x8-00': '00',
            'identity-c34x8-01': '01',
            'identity-c02c12-111': '111',
            'identity-dressed-111': '111',
        }
        self.assertEqual({case.name: case.expected_states[0] for case in identity_cases()}, expected)

    def test_four_qubit_input(self) -> None:
        """Test (C01)^8 on |0100> comes back as 0100."""
        case = gen_identity_sequence('(C01)^8', {3: 0, 2: 1, 1: 0, 0: 0})
        self.assertEqual(case.oracle, {'0100': 1.0})
        self.assertEqual(case.params['cx_count'], 8)
        exact = self.simulator.run_exact(case.circuit)
        self.assertAlmostEqual(exact['0100'], 1.0, places=12)

    def test_rejected_descriptors(self) -> None:
        """Test odd counts, non-identities, bad text and undone dressings are rejected."""
        for descriptor in ('(C01)^7', 'C01', '(C01C10)^2', 'Q01', '(C07)^2', '(C00)^2', 'H0', '(C01'):
            with self.assertRaises(DescriptorError, msg=descriptor):
                gen_identity_sequence(descriptor)


class SurfaceCodeTest(SimpleTestCase):
    """Test cases for the [[5,1,2]] family and postselection."""

    def setUp(self) -> None:
        """Set up test data."""
        self.simulator = SimulatorService()

    def test_logical_x_mask_is_bijection(self) -> None:
        """Test XOR with 00011 maps |0>_L strings onto |1>_L strings."""
        images = {format(int(key, 2) ^ 0b00011, '05b') for key in SURFACE_CODEWORDS.logical0}
        self.assertEqual(images, set(SURFACE_CODEWORDS.logical1))
        self.assertEqual(len(images), 4)

    def test_rotation_curve(self) -> None:
        """Test postselected P(|0>_L) follows cos^2(pi K / 8) and keeps every shot."""
        for k in range(9):
            case = gen_surface_code_case(k, CodeVariant.PRE_ENCODE_T)
            counts = self.simulator.sample(case.circuit, SHOTS, seed=k)
            result = postselect(counts, SURFACE_CODEWORDS)
            self.assertEqual(result.retained_fraction, 1.0)
            self.assertLessEqual(abs(result.f_logical0 - math.cos(math.pi * k / 8) ** 2), FIVE_SE)

    def test_logical_x_parity(self) -> None:
        """Test K logical X gates give |0>_L or |1>_L by the parity of K."""
        for k in range(9):
            case = gen_surface_code_case(k, CodeVariant.LOGICAL_X)
            result = postselect(self.simulator.sample(case.circuit, SHOTS, seed=k), SURFACE_CODEWORDS)
            self.assertEqual(result.f_logical0, 1.0 if k % 2 == 0 else 0.0)

    def test_oracle_examples(self) -> None:
        """Test P(|0>_L) is 1, 0.5 and 0 at K = 0, 2 and 4."""
        for k, p in ((0, 1.0), (2, 0.5), (4, 0.0)):
            case = gen_surface_code_case(k, CodeVariant.PRE_ENCODE_T)
            self.assertAlmostEqual(case.params['p_logical0'], p, places=12)

    def test_single_qubit_reference(self) -> None:
        """Test the unencoded rotation at K = 0, 3 and 4."""
        self.assertEqual(gen_single_qubit_reference(0, 'pre-encode-T').oracle['0'], 1.0)
        self.assertAlmostEqual(gen_single_qubit_reference(3, 'pre-encode-T').oracle['0'], 0.1464, places=4)
        self.assertAlmostEqual(gen_single_qubit_reference(4, 'pre-encode-T').oracle['1'], 1.0, places=12)
        self.assertEqual(gen_single_qubit_reference(3, 'logical-X').oracle, {'1': 1.0})

    def test_postselect_examples(self) -> None:
        """Test postselection on codeword, mixed and garbage tables."""
        zero = postselect(CountsTable(10, {'00000': 10}), SURFACE_CODEWORDS)
        self.assertEqual((zero.f_logical0, zero.f_logical1, zero.retained_fraction), (1.0, 0.0, 1.0))
        one = postselect(CountsTable(10, {'00011': 10}), SURFACE_CODEWORDS)
        self.assertEqual((one.f_logical0, one.f_logical1, one.retained_fraction), (0.0, 1.0, 1.0))
        mixed = postselect(CountsTable(100, {'00000': 30, '00001': 70}), SURFACE_CODEWORDS)
        self.assertEqual(mixed.retained_shots, 30)
        self.assertAlmostEqual(mixed.retained_fraction, 0.3)
        self.assertFalse(mixed.inconclusive)

    def test_postselect_nothing_retained(self) -> None:
        """Test a table outside the codespace is inconclusive."""
        result = postselect(CountsTable(5, {'00001': 5}), SURFACE_CODEWORDS)
        self.assertTrue(result.inconclusive)
        self.assertEqual(result.retained_fraction, 0.0)

    def test_postselect_needs_five_bits(self) -> None:
        """Test narrower tables are rejected."""
        with self.assertRaises(BenchmarkError):
            postselect(CountsTable(1, {'0000': 1}), SURFACE_CODEWORDS)

    def test_invalid_parameters(self) -> None:
        """Test K and the variant are validated."""
        with self.assertRaises(BenchmarkError):
            gen_surface_code_case(9, 'pre-encode-T')
        with self.assertRaises(BenchmarkError):
            gen_single_qubit_reference(1, 'logical-Y')


class FiveQubitCodeTest(SimpleTestCase):
    """Test cases for the [[5,1,3]] encoder."""

    def setUp(self) -> None:
        """Set up test data."""
        self.simulator = SimulatorService()
        self.circuits = CircuitService()
        self.star, self.profile = self.circuits.load_device('ibmqe-v1')

    def amplitudes(self, q2_value: int) -> np.ndarray:
        return self.simulator.final_state(gen_513_encoder(q2_value).circuit).amplitudes

    def test_exact_amplitudes(self) -> None:
        """Test all 32 amplitudes equal the signed codeword tables."""
        for q2_value, table in ((0, FIVE_QUBIT_CODEWORDS.logical0), (1, FIVE_QUBIT_CODEWORDS.logical1)):
            expected = np.zeros(32)
            for key, amplitude in table.items():
                expected[int(key, 2)] = amplitude
            np.testing.assert_allclose(self.amplitudes(q2_value), expected, atol=1e-10)

    def test_named_amplitudes(self) -> None:
        """Test |00011> has -1/4 in |0>_L and |11111> has +1/4 in |1>_L."""
        self.assertAlmostEqual(self.amplitudes(0)[0b00011].real, -0.25, places=10)
        self.assertAlmostEqual(self.amplitudes(1)[0b11111].real, 0.25, places=10)

    def test_codewords_orthogonal(self) -> None:
        """Test the encoded states are orthogonal."""
        self.assertLessEqual(abs(np.vdot(self.amplitudes(0), self.amplitudes(1))), 1e-12)
        self.assertEqual(FIVE_QUBIT_CODEWORDS.overlap(), 0.0)
        self.assertEqual(len(FIVE_QUBIT_CODEWORDS.logical0), 16)

    def test_support_is_uniform(self) -> None:
        """Test the exact distribution is 1/16 on each codeword string."""
        case = gen_513_encoder(0)
        exact = self.simulator.run_exact(case.circuit)
        self.assertEqual(set(exact), set(FIVE_QUBIT_CODEWORDS.logical0))
        for p in exact.values():
            self.assertAlmostEqual(p, 1 / 16, places=12)

    def test_device_legal_with_duration(self) -> None:
        """Test the encoder fits ibmqe-v1 in 80 gates and runs 26.4 to 39.6 us."""
        circuit = gen_513_encoder(0).circuit
        self.assertEqual(self.circuits.validate_coupling(circuit, self.star), [])
        census = circuit.census()
        self.assertEqual(census['cx'], 34)
        self.assertEqual(census['h'], 40)
        self.assertEqual(census['z'], 2)
        estimate = self.circuits.estimate_duration(circuit, self.profile)
        self.assertTrue(26.4e-6 <= estimate.seconds <= 39.6e-6, estimate.seconds)
        self.assertAlmostEqual(estimate.seconds, 27.56e-6, places=12)
        self.assertEqual(estimate.gate_count, 76)
        self.assertFalse(estimate.exceeds_coherence)
        self.assertFalse(estimate.exceeds_max_gates)

    def test_encoding_one_stays_under_gate_limit(self) -> None:
        """Test the q2 = 1 encoder adds only its X and Z and keeps the duration window."""
        estimate = self.circuits.estimate_duration(gen_513_encoder(1).circuit, self.profile)
        self.assertEqual(estimate.gate_count, 78)
        self.assertTrue(26.4e-6 <= estimate.seconds <= 39.6e-6, estimate.seconds)
        self.assertFalse(estimate.exceeds_max_gates)

    def test_logical_encoder_uses_controlled_y(self) -> None:
        """Test the unrewritten encoder keeps the CY pattern on q2 and no S gates."""
        gates = logical_513_encoder(0).gates
        kinds = [gate.kind for gate in gates]
        self.assertNotIn(GateKind.S, kinds)
        self.assertNotIn(GateKind.SDG, kinds)
        self.assertEqual(sum(1 for gate in gates if gate.kind == GateKind.CX), 10)
        self.assertEqual(sum(1 for gate in gates if gate.qubits in ((1, 2), (3, 2))), 4)

    def test_routed_logical_encoder(self) -> None:
        """Test routing the unrewritten encoder gives a legal, equivalent circuit."""
        logical = logical_513_encoder(0)
        self.assertNotEqual(self.circuits.validate_coupling(logical, self.star), [])
        transpiler = TranspilerService()
        routed, layout = transpiler.route(logical, self.star)
        self.assertEqual(self.circuits.validate_coupling(routed, self.star), [])
        self.assertTrue(transpiler.verify_equivalence(logical, routed, layout))

    def test_hub_encoder_equals_logical(self) -> None:
        """Test the hub rewriting changes nothing up to global phase."""
        legal = gen_513_encoder(1).circuit.without_measurements()
        self.assertTrue(TranspilerService().verify_equivalence(logical_513_encoder(1), legal))


class BenchmarkServiceTest(SimpleTestCase):
    """Test cases for BenchmarkService."""

    def setUp(self) -> None:
        """Set up test data."""
        self.service = BenchmarkService()

    def test_suite_sizes(self) -> None:
        """Test each suite's case count."""
        sizes = {name: len(self.service.build_suite(name)) for name in Suite.values}
        self.assertEqual(sizes, {'singlet': 34, 'adder': 35, 'identity': 5, 'surface': 36, 'code513': 2})
        self.assertEqual(len(self.service.build_suite('all')), 112)

    def test_unknown_suite(self) -> None:
        """Test unknown suite names are rejected."""
        with self.assertRaises(BenchmarkError):
            self.service.build_suite('teleport')

    def test_find_case(self) -> None:
        """Test cases can be looked up by name."""
        self.assertEqual(self.service.find_case('identity-c01x8-00').params['descriptor'], '(C01)^8')
        with self.assertRaises(BenchmarkError):
            self.service.find_case('missing')

    def test_every_oracle_matches_exact_simulation(self) -> None:
        """Test run_exact equals the oracle for every generated case."""
        results = self.service.check_oracles(self.service.build_suite('all'))
        self.assertEqual(results['checked'], 112)
        self.assertEqual(results['matched'], 112)
        self.assertEqual(results['errors'], 0)

    def test_mismatch_counted(self) -> None:
        """Test a wrong oracle is reported as mismatched."""
        circuit = Circuit(1, 1, (Gate.single(GateKind.X, 0), Gate.measure(0, 0)))
        case = BenchmarkCase('wrong', Suite.IDENTITY, circuit, {'0': 1.0})
        results = self.service.check_oracles([case])
        self.assertEqual((results['checked'], results['mismatched']), (1, 1))
