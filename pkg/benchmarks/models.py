"""
Benchmark models for qbench.

A benchmark case pairs a circuit with the outcome distribution an ideal
machine would produce. Oracle keys are canonical bitstrings over the
measured classical bits, highest bit first; ``qubit_column_map`` gives the
order in which a report prints those bits.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Dict, Optional, Sequence, Tuple

from django.db import models

from circuits.models import Circuit

from .exceptions import BenchmarkError

ORACLE_TOLERANCE = 1e-12


class Suite(models.TextChoices):
    """Benchmark families; each one is also a runnable suite."""
    SINGLET = 'singlet', 'Singlet correlations'
    ADDER = 'adder', 'Two-bit Fourier adder'
    IDENTITY = 'identity', 'CNOT identity sequences'
    SURFACE = 'surface', '[[5,1,2]] surface code'
    CODE513 = 'code513', '[[5,1,3]] encoder'


class CodeVariant(models.TextChoices):
    """How the K-dependent rotation enters a code benchmark."""
    PRE_ENCODE_T = 'pre-encode-T', 'K T gates on the data qubit before encoding'
    LOGICAL_X = 'logical-X', 'K logical X gates after encoding'


def display_key(key: str, measured: Sequence[int], columns: Sequence[int]) -> str:
    """
    Reorder a canonical bitstring into report columns.

    Args:
        key: Canonical bitstring, ``measured[0]`` in the first position
        measured: Measured qubits, highest first
        columns: Qubits in the order the report prints them

    Returns:
        The same outcome written in column order
    """
    position = {qubit: index for index, qubit in enumerate(measured)}
    return ''.join(key[position[qubit]] for qubit in columns)


def canonical_key(key: str, measured: Sequence[int], columns: Sequence[int]) -> str:
    """Inverse of ``display_key``."""
    by_qubit = dict(zip(columns, key))
    return ''.join(by_qubit[qubit] for qubit in measured)


@dataclass(frozen=True)
class SingletParams:
    """Measurement directions of the two spins, as angles in the y-z plane."""

    theta1: float
    theta2: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.theta1) and math.isfinite(self.theta2)):
            raise BenchmarkError(f"Singlet angles must be finite, got ({self.theta1}, {self.theta2})")

    @property
    def expected_correlation(self) -> float:
        return -math.cos(self.theta1 - self.theta2)


@dataclass(frozen=True)
class CorrelatorSet:
    """Single-spin averages F1, F2 and the two-spin correlation F."""

    F1: float
    F2: float
    F: float

    def __post_init__(self) -> None:
        for label in ('F1', 'F2', 'F'):
            value = getattr(self, label)
            if not -1.0 - ORACLE_TOLERANCE <= value <= 1.0 + ORACLE_TOLERANCE:
                raise BenchmarkError(f"Correlator {label}={value} outside [-1, 1]")

    def as_tuple(self) -> Tuple[float, float, float]:
        return (self.F1, self.F2, self.F)


@dataclass(frozen=True)
class CodewordTable:
    """
    Basis codewords of a one-logical-qubit code.

    Each column maps a canonical 5-bit string to its amplitude in the
    codeword. Distance-2 amplitudes are all +1/2; distance-3 amplitudes
    are +-1/4.
    """

    logical0: Dict[str, float]
    logical1: Dict[str, float]

    def __post_init__(self) -> None:
        overlap = set(self.logical0) & set(self.logical1)
        if overlap:
            raise BenchmarkError(f"Codeword columns share strings: {sorted(overlap)}")

    def column_of(self, key: str) -> Optional[int]:
        """0 or 1 for a codeword string, None for anything outside the codespace."""
        if key in self.logical0:
            return 0
        if key in self.logical1:
            return 1
        return None

    def overlap(self) -> float:
        """Inner product of the two codewords."""
        return sum(amplitude * self.logical1.get(key, 0.0) for key, amplitude in self.logical0.items())


@dataclass(frozen=True)
class PostselectionResult:
    """Logical frequencies after discarding outcomes outside the codespace."""

    f_logical0: float
    f_logical1: float
    retained_fraction: float
    retained_shots: int
    shots: int

    @property
    def inconclusive(self) -> bool:
        return self.retained_shots == 0

    def to_dict(self) -> Dict[str, Any]:
        return {
            'f_logical0': self.f_logical0,
            'f_logical1': self.f_logical1,
            'retained_fraction': self.retained_fraction,
            'retained_shots': self.retained_shots,
            'shots': self.shots,
            'inconclusive': self.inconclusive,
        }


@dataclass(frozen=True)
class BenchmarkCase:
    """
    A circuit and its analytic expected outcome distribution.

    ``qubit_column_map`` lists the measured qubits in report column order;
    it defaults to the canonical order (highest qubit first).
    """

    name: str
    family: Suite
    circuit: Circuit
    oracle: Dict[str, float]
    qubit_column_map: Tuple[int, ...] = ()
    params: Dict[str, Any] = field(default_factory=dict)
    codewords: Optional[CodewordTable] = None
    amplitudes: Optional[Dict[str, float]] = None

    def __post_init__(self) -> None:
        object.__setattr__(self, 'family', Suite(self.family))
        total = sum(self.oracle.values())
        if abs(total - 1.0) > ORACLE_TOLERANCE:
            raise BenchmarkError(f"Oracle of '{self.name}' sums to {total!r}, not 1")
        if any(p < 0 for p in self.oracle.values()):
            raise BenchmarkError(f"Oracle of '{self.name}' has negative entries")

        measured = self.measured
        widths = {len(key) for key in self.oracle}
        if widths != {len(measured)}:
            raise BenchmarkError(
                f"Oracle keys of '{self.name}' must have {len(measured)} bits, got widths {sorted(widths)}"
            )
        if not self.qubit_column_map:
            object.__setattr__(self, 'qubit_column_map', tuple(measured))
        elif sorted(self.qubit_column_map) != sorted(measured):
            raise BenchmarkError(
                f"Column map {self.qubit_column_map} of '{self.name}' does not cover measured qubits {measured}"
            )

    @property
    def measured(self) -> Tuple[int, ...]:
        """Measured qubits, highest first; benchmark circuits measure qubit q into bit q."""
        return tuple(self.circuit.measured_clbits)

    @property
    def expected_states(self) -> Tuple[str, ...]:
        """Oracle support, most likely first."""
        support = [(key, p) for key, p in self.oracle.items() if p > ORACLE_TOLERANCE]
        return tuple(key for key, _ in sorted(support, key=lambda item: (-item[1], item[0])))

    def display(self, key: str) -> str:
        return display_key(key, self.measured, self.qubit_column_map)

    def canonical(self, key: str) -> str:
        return canonical_key(key, self.measured, self.qubit_column_map)

    def oracle_document(self) -> Dict[str, Any]:
        """Oracle JSON: ``{"expected": {bitstring: probability}}`` plus the column order."""
        return {
            'expected': {key: self.oracle[key] for key in sorted(self.oracle)},
            'columns': list(self.qubit_column_map),
        }
