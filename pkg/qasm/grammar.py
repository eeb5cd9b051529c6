"""
pyparsing grammar for the qbench QASM dialect.

The grammar only recognises statement shapes. Gate names, register names,
index ranges and angle values are checked afterwards by ``QasmService`` so
each rejection can name its own category and position.
"""

import math
from dataclasses import dataclass
from typing import Optional, Tuple

import pyparsing as pp

MAX_PI_DENOMINATOR = 16


def pi_multiple(k: int, n: int) -> float:
    """The float both parser and serializer use for ``k*pi/n``."""
    return k * math.pi / n


@dataclass(frozen=True)
class Operand:
    """``q[3]`` or a bare register name ``q``."""

    register: str
    index: Optional[int]


@dataclass(frozen=True)
class Statement:
    """One recognised statement and the source offset it starts at."""

    kind: str
    loc: int
    name: str = ''
    angle: Optional[str] = None
    operands: Tuple[Operand, ...] = ()
    size: int = 0


def _operand(tokens: pp.ParseResults) -> Operand:
    index = tokens.get('index')
    return Operand(str(tokens['register']), None if index is None else int(index))


def _declaration(source: str, loc: int, tokens: pp.ParseResults) -> Statement:
    return Statement(str(tokens['keyword']), loc, name=str(tokens['name']), size=int(tokens['size']))


def _measure(source: str, loc: int, tokens: pp.ParseResults) -> Statement:
    return Statement('measure', loc, operands=(tokens['source'], tokens['dest']))


def _gate(source: str, loc: int, tokens: pp.ParseResults) -> Statement:
    angle = tokens.get('angle')
    return Statement(
        'gate', loc,
        name=str(tokens['name']),
        angle=None if angle is None else str(angle).strip(),
        operands=tuple(tokens['operands']),
    )


_IDENT = pp.Word(pp.alphas + '_', pp.alphanums + '_')
_INTEGER = pp.Word(pp.nums, max=18)
_SEMI = pp.Suppress(';')

_OPERAND = (
    _IDENT('register') + pp.Optional(pp.Suppress('[') + _INTEGER('index') + pp.Suppress(']'))
).set_parse_action(_operand)

_VERSION = pp.Suppress(pp.Keyword('OPENQASM') + pp.Regex(r'\d+(\.\d+)?') + _SEMI)
_INCLUDE = pp.Suppress(pp.Keyword('include') + pp.QuotedString('"') + _SEMI)

_DECLARATION = (
    (pp.Keyword('qreg') | pp.Keyword('creg'))('keyword') + _IDENT('name')
    + pp.Suppress('[') + _INTEGER('size') + pp.Suppress(']') + _SEMI
).set_parse_action(_declaration)

_MEASURE = (
    pp.Suppress(pp.Keyword('measure')) + _OPERAND('source') + pp.Suppress('->') + _OPERAND('dest') + _SEMI
).set_parse_action(_measure)

_ANGLE_TEXT = pp.Suppress('(') + pp.Optional(pp.CharsNotIn('();'), default='')('angle') + pp.Suppress(')')

_GATE = (
    _IDENT('name') + pp.Optional(_ANGLE_TEXT)
    + pp.Group(_OPERAND + pp.ZeroOrMore(pp.Suppress(',') + _OPERAND))('operands') + _SEMI
).set_parse_action(_gate)

PROGRAM = pp.Optional(_VERSION) + pp.ZeroOrMore(_INCLUDE | _DECLARATION | _MEASURE | _GATE)
PROGRAM.ignore(pp.cpp_style_comment)

_PI_TERM = pp.Optional(_INTEGER('k') + pp.Suppress('*')) + pp.Keyword('pi') + pp.Optional(pp.Suppress('/') + _INTEGER('n'))
_DECIMAL = pp.Regex(r'(\d+\.?\d*|\.\d+)([eE][+-]?\d+)?')

ANGLE = pp.Group(pp.ZeroOrMore(pp.Literal('-')))('signs') + (pp.Group(_PI_TERM)('pi') | _DECIMAL('value'))


def evaluate_angle(text: str) -> float:
    """
    Evaluate a dialect angle: a decimal, ``pi``, ``k*pi``, ``pi/n`` or
    ``k*pi/n``, with any number of leading minus signs.

    Raises:
        ValueError: If the text is not such an expression or is not finite
    """
    try:
        result = ANGLE.parse_string(text, parse_all=True)
    except pp.ParseException as e:
        raise ValueError(f"unsupported angle expression '{text}'") from e

    try:
        if 'pi' in result:
            term = result['pi']
            value = pi_multiple(int(term.get('k', 1)), int(term.get('n', 1)))
        else:
            value = float(result['value'])
    except (ZeroDivisionError, OverflowError) as e:
        raise ValueError(f"angle '{text}' cannot be evaluated: {e}") from e

    if len(result['signs']) % 2:
        value = -value
    if not math.isfinite(value):
        raise ValueError(f"angle '{text}' is not finite")
    return value


def format_angle(angle: float) -> str:
    """Render an angle as ``k*pi/n`` (n <= 16) when that is exact, else as a decimal."""
    if angle == 0:
        return '0'
    sign = '-' if angle < 0 else ''
    magnitude = -angle if angle < 0 else angle

    for n in range(1, MAX_PI_DENOMINATOR + 1):
        k = round(magnitude * n / math.pi)
        if k >= 1 and pi_multiple(k, n) == magnitude:
            numerator = 'pi' if k == 1 else f'{k}*pi'
            return sign + (numerator if n == 1 else f'{numerator}/{n}')

    text = f'{magnitude:.12g}'
    if float(text) != magnitude:
        text = repr(magnitude)
    return sign + text
