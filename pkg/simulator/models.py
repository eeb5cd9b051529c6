"""
Simulator models for qbench.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from datetime import datetime, timezone
from typing import Any, Dict, Optional

import numpy as np
from django.db import models

from .exceptions import SimulationError

NORM_TOLERANCE = 1e-12
DATE_FORMAT = '%Y-%m-%dT%H:%M:%SZ'


def utc_timestamp() -> str:
    return datetime.now(timezone.utc).strftime(DATE_FORMAT)


class NoiseChannel(models.TextChoices):
    """Error channel fired after a gate."""
    BIT_FLIP = 'bitflip', 'Bit flip'
    DEPOLARIZING = 'depolarizing', 'Depolarizing'


@dataclass
class StateVector:
    """Pure state of ``num_qubits`` qubits; amplitude bit k is qubit k."""

    num_qubits: int
    amplitudes: np.ndarray

    def __post_init__(self) -> None:
        if self.amplitudes.shape != (1 << self.num_qubits,):
            raise SimulationError(
                f"Expected {1 << self.num_qubits} amplitudes, got {self.amplitudes.shape}"
            )

    @classmethod
    def zero(cls, num_qubits: int) -> StateVector:
        amplitudes = np.zeros(1 << num_qubits, dtype=complex)
        amplitudes[0] = 1.0
        return cls(num_qubits, amplitudes)

    @property
    def norm_error(self) -> float:
        return float(abs(1.0 - np.vdot(self.amplitudes, self.amplitudes).real))

    def amplitude(self, bitstring: str) -> complex:
        """Amplitude of a basis state written q_{n-1} ... q_0."""
        if len(bitstring) != self.num_qubits:
            raise SimulationError(f"Bitstring '{bitstring}' does not have {self.num_qubits} bits")
        return complex(self.amplitudes[int(bitstring, 2)])

    def copy(self) -> StateVector:
        return StateVector(self.num_qubits, self.amplitudes.copy())


@dataclass(frozen=True)
class NoiseModel:
    """Per-gate error model: each touched qubit is corrupted with probability 1 - p_correct."""

    p_correct: float
    channel: NoiseChannel = NoiseChannel.BIT_FLIP

    def __post_init__(self) -> None:
        if not 0.0 < self.p_correct <= 1.0:
            raise SimulationError(f"p_correct must lie in (0, 1], got {self.p_correct}")
        object.__setattr__(self, 'channel', NoiseChannel(self.channel))


@dataclass(frozen=True)
class CountsTable:
    """
    Outcome tallies of N shots, keyed by bitstrings with bit 0 rightmost.

    This is also the interchange format for counts produced by external
    hardware; ``to_dict``/``from_dict`` follow the counts JSON schema.
    """

    shots: int
    counts: Dict[str, int]
    backend: str = 'ideal'
    date: str = field(default_factory=utc_timestamp)
    seed: Optional[int] = None
    circuit_name: str = ''
    metadata: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.shots < 1:
            raise SimulationError(f"A counts table needs at least one shot, got {self.shots}")
        widths = {len(key) for key in self.counts}
        if len(widths) > 1:
            raise SimulationError(f"Bitstrings of mixed width: {sorted(widths)}")
        for key, value in self.counts.items():
            if not key or set(key) - {'0', '1'}:
                raise SimulationError(f"Invalid bitstring key '{key}'")
            if value < 0:
                raise SimulationError(f"Negative count for '{key}'")
        total = sum(self.counts.values())
        if total != self.shots:
            raise SimulationError(f"Counts sum to {total} but shots is {self.shots}")

    @property
    def width(self) -> int:
        return len(next(iter(self.counts))) if self.counts else 0

    def to_dict(self) -> Dict[str, Any]:
        document: Dict[str, Any] = {
            'backend': self.backend,
            'date': self.date,
            'shots': self.shots,
            'seed': self.seed,
            'counts': {key: self.counts[key] for key in sorted(self.counts)},
            'circuit_name': self.circuit_name,
        }
        if self.metadata:
            document['metadata'] = self.metadata
        return document

    @classmethod
    def from_dict(cls, document: Dict[str, Any]) -> CountsTable:
        return cls(
            shots=int(document['shots']),
            counts={str(k): int(v) for k, v in document['counts'].items()},
            backend=str(document.get('backend', 'external')),
            date=str(document.get('date', '')),
            seed=document.get('seed'),
            circuit_name=str(document.get('circuit_name', '')),
            metadata=dict(document.get('metadata', {})),
        )
