"""
Analysis models for qbench.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Dict, List, Tuple

from django.db import models

FIT_BASIS = ('singlet', 'phi_minus', 'phi_plus', 'triplet_zero')

VERDICT_COLORS = {
    'Correct': 'green',
    'Wrong': 'red',
    'UnexpectedSuperposition': 'magenta',
    'Inconclusive': 'grey',
}


class VerdictClass(models.TextChoices):
    """Outcome classes of the correctness rule, with their report colors."""
    CORRECT = 'Correct', 'Correct'
    WRONG = 'Wrong', 'Wrong'
    UNEXPECTED_SUPERPOSITION = 'UnexpectedSuperposition', 'Unexpected superposition'
    INCONCLUSIVE = 'Inconclusive', 'Inconclusive'

    @property
    def color(self) -> str:
        return VERDICT_COLORS[self.value]


class Stationarity(models.TextChoices):
    STATIONARY = 'stationary', 'Stationary'
    NON_STATIONARY = 'non-stationary', 'Non-stationary'
    INCONCLUSIVE = 'inconclusive', 'Inconclusive'


@dataclass(frozen=True)
class Verdict:
    """
    Classification of one counts table against its oracle.

    ``top_states`` lists every observed outcome by descending frequency,
    ties in lexicographic order. ``margin`` is the top frequency minus the
    runner-up's.
    """

    verdict_class: VerdictClass
    top_states: Tuple[Tuple[str, float], ...]
    expected: Tuple[str, ...]
    shots: int
    se: float
    k_se: float
    margin: float

    @property
    def color(self) -> str:
        return VerdictClass(self.verdict_class).color

    @property
    def is_correct(self) -> bool:
        return self.verdict_class == VerdictClass.CORRECT

    def to_dict(self) -> Dict[str, Any]:
        return {
            'class': str(self.verdict_class.value),
            'color': self.color,
            'top_states': [[key, freq] for key, freq in self.top_states],
            'expected': list(self.expected),
            'shots': self.shots,
            'se': self.se,
            'k_se': self.k_se,
            'margin': self.margin,
        }


@dataclass(frozen=True)
class StationarityReport:
    """Top state per run, pairwise top-frequency deltas and the resulting verdict."""

    runs: Tuple[Tuple[str, float], ...]
    deltas: Tuple[Tuple[int, int, float], ...]
    verdict: Stationarity
    k_se: float
    threshold: float

    @property
    def max_delta(self) -> float:
        return max((delta for _, _, delta in self.deltas), default=0.0)

    def to_dict(self) -> Dict[str, Any]:
        return {
            'verdict': str(self.verdict.value),
            'runs': [[key, freq] for key, freq in self.runs],
            'deltas': [[i, j, delta] for i, j, delta in self.deltas],
            'max_delta': self.max_delta,
            'threshold': self.threshold,
            'k_se': self.k_se,
        }


@dataclass(frozen=True)
class PureStateFit:
    """
    Two-qubit pure state fitted to correlator data.

    ``coefficients`` are complex amplitudes on the singlet,
    (|00>-|11>)/sqrt2, (|00>+|11>)/sqrt2 and (|01>+|10>)/sqrt2, normalised
    with the singlet coefficient real and non-negative.
    """

    coefficients: Tuple[complex, complex, complex, complex]
    residual: float
    converged: bool
    starts: int
    history: List[float] = field(default_factory=list)

    @property
    def magnitudes(self) -> Tuple[float, ...]:
        return tuple(abs(c) for c in self.coefficients)

    def to_dict(self) -> Dict[str, Any]:
        return {
            'basis': list(FIT_BASIS),
            'coefficients': [[c.real, c.imag] for c in self.coefficients],
            'magnitudes': list(self.magnitudes),
            'residual': self.residual,
            'converged': self.converged,
            'starts': self.starts,
        }
