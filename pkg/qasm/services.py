"""
QASM services for qbench.
"""

import logging
from pathlib import Path
from typing import Dict, List, Optional, Set, Union

import pyparsing as pp
from django.conf import settings

from circuits.exceptions import CircuitError
from circuits.models import Circuit, Gate, GateKind

from .exceptions import ParseError, ParseErrorKind, SourceSpan
from .grammar import PROGRAM, Operand, Statement, evaluate_angle, format_angle

logger = logging.getLogger(__name__)

HEADER = 'OPENQASM 2.0;\ninclude "qelib1.inc";\n'

FIXED_GATES: Dict[str, GateKind] = {
    kind.value: kind
    for kind in (GateKind.X, GateKind.Y, GateKind.Z, GateKind.H,
                 GateKind.S, GateKind.SDG, GateKind.T, GateKind.TDG)
}

RESERVED = {'measure', 'qreg', 'creg', 'include', 'OPENQASM'}


class _Register:
    def __init__(self, name: str, size: int) -> None:
        self.name = name
        self.size = size


class _ProgramBuilder:
    """Turns recognised statements into gates, stopping at the first error."""

    def __init__(self, source: str) -> None:
        self.source = source
        self.qreg: Optional[_Register] = None
        self.creg: Optional[_Register] = None
        self.gates: List[Gate] = []
        self.measured: Set[int] = set()

    def span(self, loc: int) -> SourceSpan:
        return SourceSpan(pp.lineno(loc, self.source), pp.col(loc, self.source))

    def fail(self, kind: ParseErrorKind, loc: int, message: str) -> ParseError:
        return ParseError(kind, self.span(loc), message)

    def add(self, statement: Statement) -> None:
        if statement.kind in ('qreg', 'creg'):
            self._declare(statement)
        elif statement.kind == 'measure':
            self._measure(statement)
        else:
            self._gate(statement)

    def _declare(self, statement: Statement) -> None:
        limit = int(getattr(settings, 'QBENCH_MAX_REGISTER', 64))
        if statement.size > limit:
            raise self.fail(
                ParseErrorKind.SYNTAX, statement.loc,
                f"register '{statement.name}' has {statement.size} bits, above the limit of {limit}",
            )
        declared = {r.name for r in (self.qreg, self.creg) if r is not None}
        if statement.name in declared:
            raise self.fail(ParseErrorKind.SYNTAX, statement.loc, f"register '{statement.name}' declared twice")
        if statement.kind == 'qreg':
            if self.qreg is not None:
                raise self.fail(ParseErrorKind.SYNTAX, statement.loc, "only one quantum register is supported")
            if statement.size < 1:
                raise self.fail(ParseErrorKind.SYNTAX, statement.loc, "a quantum register needs at least one qubit")
            self.qreg = _Register(statement.name, statement.size)
        else:
            if self.creg is not None:
                raise self.fail(ParseErrorKind.SYNTAX, statement.loc, "only one classical register is supported")
            self.creg = _Register(statement.name, statement.size)

    def _resolve(self, operand: Operand, register: Optional[_Register], loc: int, role: str) -> List[int]:
        if register is None or operand.register != register.name:
            raise self.fail(
                ParseErrorKind.UNDECLARED_REGISTER, loc,
                f"'{operand.register}' is not the declared {role} register",
            )
        if operand.index is None:
            return list(range(register.size))
        if operand.index >= register.size:
            raise self.fail(
                ParseErrorKind.INDEX_OUT_OF_RANGE, loc,
                f"{operand.register}[{operand.index}] is outside {operand.register}[{register.size}]",
            )
        return [operand.index]

    def _append(self, gate: Gate, loc: int) -> None:
        if gate.kind != GateKind.BARRIER and self.measured.intersection(gate.qubits):
            raise self.fail(ParseErrorKind.SYNTAX, loc, f"'{gate}' acts on a qubit that was already measured")
        if gate.kind == GateKind.MEASURE:
            self.measured.add(gate.qubits[0])
        self.gates.append(gate)

    def _measure(self, statement: Statement) -> None:
        source, dest = statement.operands
        qubits = self._resolve(source, self.qreg, statement.loc, 'quantum')
        clbits = self._resolve(dest, self.creg, statement.loc, 'classical')
        if (source.index is None) != (dest.index is None) or len(qubits) != len(clbits):
            raise self.fail(ParseErrorKind.SYNTAX, statement.loc, "measure operands do not line up")
        for qubit, clbit in zip(qubits, clbits):
            self._append(Gate.measure(qubit, clbit), statement.loc)

    def _gate(self, statement: Statement) -> None:
        name, loc = statement.name, statement.loc
        if name in RESERVED:
            raise self.fail(ParseErrorKind.SYNTAX, loc, f"malformed '{name}' statement")
        if name not in FIXED_GATES and name not in ('u1', 'cx', 'barrier'):
            raise self.fail(ParseErrorKind.UNKNOWN_GATE, loc, f"unknown gate '{name}'")

        angle: Optional[float] = None
        if name == 'u1':
            if statement.angle is None:
                raise self.fail(ParseErrorKind.SYNTAX, loc, "u1 needs an angle")
            try:
                angle = evaluate_angle(statement.angle)
            except ValueError as e:
                raise self.fail(ParseErrorKind.BAD_ANGLE_EXPR, loc, str(e)) from e
        elif statement.angle is not None:
            raise self.fail(ParseErrorKind.SYNTAX, loc, f"{name} takes no angle")

        targets = [self._resolve(operand, self.qreg, loc, 'quantum') for operand in statement.operands]
        try:
            if name == 'barrier':
                self._append(Gate.barrier(*[q for group in targets for q in group]), loc)
            elif name == 'cx':
                if len(targets) != 2 or any(operand.index is None for operand in statement.operands):
                    raise self.fail(ParseErrorKind.SYNTAX, loc, "cx needs two indexed qubits")
                self._append(Gate.cx(targets[0][0], targets[1][0]), loc)
            else:
                if len(targets) != 1:
                    raise self.fail(ParseErrorKind.SYNTAX, loc, f"{name} acts on one qubit")
                for qubit in targets[0]:
                    gate = Gate.u1(angle, qubit) if angle is not None else Gate.single(FIXED_GATES[name], qubit)
                    self._append(gate, loc)
        except CircuitError as e:
            raise self.fail(ParseErrorKind.SYNTAX, loc, str(e)) from e

    def build(self, name: str) -> Circuit:
        if self.qreg is None:
            raise self.fail(ParseErrorKind.SYNTAX, len(self.source), "no quantum register declared")
        return Circuit(
            num_qubits=self.qreg.size,
            num_clbits=self.creg.size if self.creg else 0,
            gates=tuple(self.gates),
            name=name,
        )


class QasmService:
    """
    Service for reading and writing QASM programs.

    The dialect holds one quantum and one classical register, the built-in
    gate set and ``measure``. Sources may use LF or CRLF line endings;
    output always uses LF.
    """

    def __init__(self) -> None:
        """Initialize the QASM service."""
        pass

    def parse(self, source: str, name: str = '') -> Circuit:
        """
        Parse a QASM program into a circuit.

        Args:
            source: Program text
            name: Name given to the resulting circuit

        Returns:
            The circuit, gates in source order

        Raises:
            ParseError: At the first statement that cannot be accepted
        """
        text = source.lstrip('\ufeff').replace('\r\n', '\n').replace('\r', '\n')
        try:
            statements = PROGRAM.parse_string(text, parse_all=True)
        except pp.ParseBaseException as e:
            snippet = e.line.strip()
            raise ParseError(
                ParseErrorKind.SYNTAX,
                SourceSpan(e.lineno, e.col),
                f"cannot parse statement '{snippet}'" if snippet else "unexpected end of input",
            ) from None
        except RecursionError:
            raise ParseError(ParseErrorKind.SYNTAX, SourceSpan(1, 1), "input nests too deeply") from None

        builder = _ProgramBuilder(text)
        for statement in statements:
            builder.add(statement)
        circuit = builder.build(name)
        logger.debug(f"Parsed QASM '{name}': {len(circuit)} gates on {circuit.num_qubits} qubits")
        return circuit

    def serialize(self, circuit: Circuit) -> str:
        """
        Render a circuit as canonical QASM text.

        Args:
            circuit: The circuit to render

        Returns:
            LF-terminated program text that parses back to the same gates
        """
        lines = [f'qreg q[{circuit.num_qubits}];']
        if circuit.num_clbits:
            lines.append(f'creg c[{circuit.num_clbits}];')

        for gate in circuit.gates:
            operands = ','.join(f'q[{q}]' for q in gate.qubits)
            if gate.kind == GateKind.MEASURE:
                lines.append(f'measure q[{gate.qubits[0]}] -> c[{gate.clbit}];')
            elif gate.kind == GateKind.U1:
                assert gate.angle is not None
                lines.append(f'u1({format_angle(gate.angle)}) {operands};')
            else:
                lines.append(f'{gate.kind.value} {operands};')

        return HEADER + '\n'.join(lines) + '\n'

    def load(self, path: Union[str, Path]) -> Circuit:
        """
        Parse a .qasm file; the circuit is named after the file stem.

        Raises:
            ParseError: If the file cannot be read or parsed
        """
        path = Path(path)
        try:
            source = path.read_text(encoding='utf-8')
        except (OSError, UnicodeDecodeError) as e:
            raise ParseError(ParseErrorKind.SYNTAX, SourceSpan(1, 1), f"cannot read {path}: {e}") from e
        logger.info(f"Loading QASM listing {path}")
        return self.parse(source, name=path.stem)
