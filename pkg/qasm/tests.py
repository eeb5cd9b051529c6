"""
Unit tests for qasm app.
"""

import math
import random
from pathlib import Path

from django.test import SimpleTestCase

from circuits.models import Circuit, Gate, GateKind

from .exceptions import ParseError, ParseErrorKind, SourceSpan
from .grammar import evaluate_angle, format_angle, pi_multiple
from .services import QasmService

LISTINGS = Path(__file__).resolve().parent.parent / 'benchmarks' / 'listings'


def random_circuit(rng: random.Random) -> Circuit:
    num_qubits = rng.randint(1, 6)
    kinds = [GateKind.X, GateKind.Y, GateKind.Z, GateKind.H,
             GateKind.S, GateKind.SDG, GateKind.T, GateKind.TDG]
    gates = []
    for _ in range(rng.randint(0, 25)):
        roll = rng.random()
        qubit = rng.randrange(num_qubits)
        if roll < 0.2 and num_qubits > 1:
            control, target = rng.sample(range(num_qubits), 2)
            gates.append(Gate.cx(control, target))
        elif roll < 0.35:
            angle = pi_multiple(rng.randint(-20, 20), rng.randint(1, 16))
            gates.append(Gate.u1(angle, qubit))
        elif roll < 0.5:
            gates.append(Gate.u1(rng.uniform(-10, 10), qubit))
        elif roll < 0.55:
            gates.append(Gate.barrier(*rng.sample(range(num_qubits), rng.randint(1, num_qubits))))
        else:
            gates.append(Gate.single(rng.choice(kinds), qubit))
    for qubit in rng.sample(range(num_qubits), rng.randint(0, num_qubits)):
        gates.append(Gate.measure(qubit, qubit))
    return Circuit(num_qubits, num_qubits, tuple(gates), name='random')


class AngleTest(SimpleTestCase):
    """Test cases for angle expressions."""

    def test_pi_forms(self) -> None:
        """Test pi, k*pi, pi/n and k*pi/n."""
        self.assertEqual(evaluate_angle('pi'), math.pi)
        self.assertEqual(evaluate_angle('3*pi/4'), pi_multiple(3, 4))
        self.assertEqual(evaluate_angle('pi/2'), math.pi / 2)
        self.assertEqual(evaluate_angle('-pi/4'), -math.pi / 4)
        self.assertEqual(evaluate_angle('2*pi'), 2 * math.pi)

    def test_decimals_and_minus(self) -> None:
        """Test decimal literals and repeated unary minus."""
        self.assertEqual(evaluate_angle('0.125'), 0.125)
        self.assertEqual(evaluate_angle('--1.5'), 1.5)
        self.assertEqual(evaluate_angle('1e-3'), 0.001)

    def test_rejected_expressions(self) -> None:
        """Test unsupported and degenerate expressions."""
        for text in ('', 'pi/0', 'sin(1)', 'pi*2', '1e999', 'theta', '3.5*pi'):
            with self.assertRaises(ValueError, msg=text):
                evaluate_angle(text)

    def test_format_prefers_pi_fraction(self) -> None:
        """Test exact pi multiples are written as fractions."""
        self.assertEqual(format_angle(math.pi / 4), 'pi/4')
        self.assertEqual(format_angle(-3 * math.pi / 8), '-3*pi/8')
        self.assertEqual(format_angle(math.pi), 'pi')
        self.assertEqual(format_angle(0.0), '0')
        self.assertEqual(format_angle(0.5), '0.5')

    def test_format_round_trips_floats(self) -> None:
        """Test arbitrary floats survive format then evaluate."""
        rng = random.Random(4)
        for _ in range(500):
            angle = rng.uniform(-100, 100)
            self.assertEqual(evaluate_angle(format_angle(angle)), angle)


class ParseTest(SimpleTestCase):
    """Test cases for QasmService.parse."""

    def setUp(self) -> None:
        """Set up test data."""
        self.service = QasmService()

    def test_minimal_program(self) -> None:
        """Test a program without header gives a two-gate circuit."""
        circuit = self.service.parse('qreg q[2]; creg c[2]; x q[0]; measure q[0] -> c[0];')
        self.assertEqual(len(circuit), 2)
        self.assertEqual(circuit.gates[1], Gate.measure(0, 0))

    def test_singlet_listing_census(self) -> None:
        """Test the singlet listing holds 2 X, 5 H, 2 U1 and 1 CX."""
        circuit = self.service.load(LISTINGS / 'singlet.qasm')
        census = circuit.census()
        self.assertEqual(census['x'], 2)
        self.assertEqual(census['h'], 5)
        self.assertEqual(census['u1'], 2)
        self.assertEqual(census['cx'], 1)
        self.assertEqual(census['measure'], 2)
        self.assertEqual(circuit.name, 'singlet')

    def test_comments_and_blank_lines_ignored(self) -> None:
        """Test comments and blank lines do not change the parse."""
        plain = 'qreg q[2];\ncreg c[2];\nh q[0];\ncx q[0],q[1];\n'
        noisy = '// header\n\nqreg q[2]; // two\n\n/* block */creg c[2];\nh q[0];\n// gap\ncx q[0],q[1];\n'
        self.assertEqual(self.service.parse(plain), self.service.parse(noisy))

    def test_crlf_accepted(self) -> None:
        """Test CRLF line endings parse like LF."""
        text = 'OPENQASM 2.0;\ninclude "qelib1.inc";\nqreg q[1];\ncreg c[1];\nh q[0];\n'
        self.assertEqual(self.service.parse(text.replace('\n', '\r\n')), self.service.parse(text))

    def test_register_broadcast(self) -> None:
        """Test bare registers apply to every index."""
        circuit = self.service.parse('qreg q[3]; creg c[3]; h q; measure q -> c;')
        self.assertEqual(circuit.census(), {'h': 3, 'measure': 3})
        self.assertEqual(circuit.gates[-1], Gate.measure(2, 2))

    def test_barrier_preserved(self) -> None:
        """Test barriers keep their qubit list."""
        circuit = self.service.parse('qreg q[3]; barrier q[2],q[0];')
        self.assertEqual(circuit.gates, (Gate.barrier(2, 0),))

    def test_index_out_of_range(self) -> None:
        """Test cx on q[7] of a 5-qubit register is rejected with its position."""
        with self.assertRaises(ParseError) as ctx:
            self.service.parse('qreg q[5];\ncreg c[5];\n  cx q[0],q[7];\n')
        self.assertEqual(ctx.exception.kind, ParseErrorKind.INDEX_OUT_OF_RANGE)
        self.assertEqual(ctx.exception.span, SourceSpan(3, 3))

    def test_unknown_gate(self) -> None:
        """Test gates outside the dialect are rejected."""
        with self.assertRaises(ParseError) as ctx:
            self.service.parse('qreg q[2];\nccx q[0],q[1];')
        self.assertEqual(ctx.exception.kind, ParseErrorKind.UNKNOWN_GATE)
        self.assertEqual(ctx.exception.span.line, 2)

    def test_undeclared_register(self) -> None:
        """Test operands must name the declared register."""
        with self.assertRaises(ParseError) as ctx:
            self.service.parse('qreg q[2];\nx r[0];')
        self.assertEqual(ctx.exception.kind, ParseErrorKind.UNDECLARED_REGISTER)

    def test_bad_angle(self) -> None:
        """Test malformed angle expressions are rejected."""
        with self.assertRaises(ParseError) as ctx:
            self.service.parse('qreg q[1];\nu1(pi/) q[0];')
        self.assertEqual(ctx.exception.kind, ParseErrorKind.BAD_ANGLE_EXPR)

    def test_syntax_errors(self) -> None:
        """Test malformed statements and second registers are syntax errors."""
        sources = [
            'qreg q[2]\nx q[0];',
            'qreg q[2]; qreg r[2];',
            'qreg q[2]; creg c[1]; creg d[1];',
            'qreg q[2]; gate foo a { x a; }',
            'qreg q[2]; creg c[2]; if (c==1) x q[0];',
            'creg c[2];',
            'qreg q[2]; creg c[2]; measure q[0] -> c[0]; x q[0];',
            'qreg q[2]; cx q[1],q[1];',
            'qreg q[1]; h(0.5) q[0];',
        ]
        for source in sources:
            with self.assertRaises(ParseError, msg=source) as ctx:
                self.service.parse(source)
            self.assertEqual(ctx.exception.kind, ParseErrorKind.SYNTAX, msg=source)

    def test_oversized_register_is_rejected(self) -> None:
        """Test a huge register fails at its declaration before barrier expansion."""
        with self.assertRaises(ParseError) as ctx:
            self.service.parse('qreg q[4444444443];\ncreg c[3];\nbarrier q;')
        self.assertEqual(ctx.exception.kind, ParseErrorKind.SYNTAX)
        self.assertEqual(ctx.exception.span.line, 1)

    def test_overlong_integer_is_a_syntax_error(self) -> None:
        """Test integer literals beyond the grammar's width are syntax errors."""
        with self.assertRaises(ParseError) as ctx:
            self.service.parse('qreg q[' + '9' * 5000 + '];')
        self.assertEqual(ctx.exception.kind, ParseErrorKind.SYNTAX)

    def test_register_limit_follows_settings(self) -> None:
        """Test QBENCH_MAX_REGISTER bounds register declarations."""
        with self.settings(QBENCH_MAX_REGISTER=4):
            self.assertEqual(self.service.parse('qreg q[4];').num_qubits, 4)
            with self.assertRaises(ParseError) as ctx:
                self.service.parse('qreg q[2];\ncreg c[5];')
        self.assertEqual(ctx.exception.span.line, 2)

    def test_program_without_classical_register(self) -> None:
        """Test gate-only programs parse with no classical bits but cannot measure."""
        circuit = self.service.parse('qreg q[2];\nh q[0];\ncx q[0],q[1];')
        self.assertEqual(circuit.num_clbits, 0)
        with self.assertRaises(ParseError) as ctx:
            self.service.parse('qreg q[1];\nh q[0];\nmeasure q[0] -> c[0];')
        self.assertEqual(ctx.exception.kind, ParseErrorKind.UNDECLARED_REGISTER)
        self.assertEqual(ctx.exception.span.line, 3)

    def test_fuzzed_input_only_raises_parse_errors(self) -> None:
        """Test random text is either accepted or rejected with a span."""
        rng = random.Random(17)
        alphabet = 'qreg creg x h cx u1 measure -> [ ] ( ) ; , pi / * 0 1 2 9 \n // q c'.split(' ')
        for _ in range(300):
            text = ' '.join(rng.choice(alphabet) for _ in range(rng.randint(0, 30)))
            try:
                self.service.parse(text)
            except ParseError as e:
                self.assertGreaterEqual(e.span.line, 1)
                self.assertGreaterEqual(e.span.column, 1)
                self.assertTrue(e.message)


class SerializeTest(SimpleTestCase):
    """Test cases for QasmService.serialize."""

    def setUp(self) -> None:
        """Set up test data."""
        self.service = QasmService()

    def test_empty_circuit(self) -> None:
        """Test an empty circuit is header plus declarations."""
        text = self.service.serialize(Circuit(1, 1))
        self.assertTrue(text.startswith('OPENQASM 2.0;\n'))
        self.assertTrue(text.endswith('qreg q[1];\ncreg c[1];\n'))

    def test_u1_pi_over_four(self) -> None:
        """Test U1(pi/4) renders as a pi fraction."""
        text = self.service.serialize(Circuit(2, 0, (Gate.u1(math.pi / 4, 1),)))
        self.assertIn('u1(pi/4) q[1];', text.splitlines())

    def test_adder_listing_round_trip(self) -> None:
        """Test parse, serialize, parse preserves the adder gate sequence."""
        first = self.service.load(LISTINGS / 'adder_1_3.qasm')
        second = self.service.parse(self.service.serialize(first), name=first.name)
        self.assertEqual(second, first)

    def test_random_round_trip(self) -> None:
        """Test parse(serialize(c)) == c for random circuits."""
        rng = random.Random(2024)
        for _ in range(1000):
            circuit = random_circuit(rng)
            self.assertEqual(self.service.parse(self.service.serialize(circuit), name='random'), circuit)

    def test_output_uses_lf(self) -> None:
        """Test serialized text has no carriage returns."""
        self.assertNotIn('\r', self.service.serialize(Circuit(2, 2, (Gate.cx(0, 1),))))
