"""
Analysis services for qbench.

The statistics follow one rule: with N shots a relative frequency is
trusted to within SE = 1/sqrt(N), and two frequencies closer than k SE
(k = 5 by default) are indistinguishable.
"""

import logging
import math
from fractions import Fraction
from itertools import combinations
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

from django.conf import settings

from simulator.models import CountsTable

from .exceptions import AnalysisError
from .models import Stationarity, StationarityReport, Verdict, VerdictClass

logger = logging.getLogger(__name__)

ORACLE_SUPPORT_FLOOR = 1e-12


class AnalysisService:
    """
    Service for turning counts tables into verdicts.

    Every operation is a pure function of its inputs and the configured
    SE multiplier.
    """

    def __init__(self, k_se: Optional[float] = None, runner_up_k: Optional[float] = None) -> None:
        """Initialize the analysis service."""
        self.k_se = float(k_se if k_se is not None else getattr(settings, 'QBENCH_K_SE', 5))
        self.runner_up_k = float(
            runner_up_k if runner_up_k is not None else getattr(settings, 'QBENCH_RUNNER_UP_SE', 1)
        )

    def rel_freqs(self, counts: CountsTable) -> Dict[str, Fraction]:
        """
        Relative frequency of every observed outcome.

        Args:
            counts: A counts table with at least one shot

        Returns:
            Mapping bitstring -> count / N as exact fractions, so the values
            sum to exactly 1

        Raises:
            AnalysisError: If the table holds no outcomes
        """
        if not counts.counts or counts.shots < 1:
            raise AnalysisError(f"Counts table '{counts.circuit_name}' is empty")
        return {key: Fraction(value, counts.shots) for key, value in counts.counts.items() if value}

    def frequencies(self, counts: CountsTable) -> Dict[str, float]:
        return {key: float(f) for key, f in self.rel_freqs(counts).items()}

    def se_bound(self, shots: int) -> float:
        """
        Worst-case standard error 1/sqrt(N) of a relative frequency.

        Raises:
            AnalysisError: If shots < 1
        """
        if shots < 1:
            raise AnalysisError(f"shots must be at least 1, got {shots}")
        return 1.0 / math.sqrt(shots)

    def equal_within(self, f1: float, f2: float, shots: int, k: Optional[float] = None) -> bool:
        """True if |f1 - f2| <= k SE; for tiny N this holds for any pair."""
        k = self.k_se if k is None else k
        return abs(f1 - f2) <= k * self.se_bound(shots)

    @staticmethod
    def ranked(frequencies: Mapping[str, float]) -> List[Tuple[str, float]]:
        """Outcomes by descending frequency, ties in lexicographic order."""
        return sorted(frequencies.items(), key=lambda item: (-item[1], item[0]))

    def verdict(self, counts: CountsTable, oracle: Mapping[str, float]) -> Verdict:
        """
        Classify a counts table against its oracle.

        For a unique expected state: Correct if it is the strict top state;
        UnexpectedSuperposition if it ties bit-for-bit with another state for
        the top, or if it is the runner-up within ``runner_up_k`` SE of the
        top (1 SE by default, tighter than the k SE used for stationarity);
        Wrong otherwise. For an oracle with n expected states: Correct iff
        the n most frequent outcomes are exactly those states, Inconclusive
        if a tie straddles the n-th place, Wrong otherwise.

        Args:
            counts: Observed counts
            oracle: Expected distribution; entries above 1e-12 are the expected states

        Returns:
            The verdict, with all observed states ranked

        Raises:
            AnalysisError: If the counts are empty or the oracle expects nothing
        """
        expected = tuple(sorted(key for key, p in oracle.items() if p > ORACLE_SUPPORT_FLOOR))
        if not expected:
            raise AnalysisError("Oracle has no expected state")

        ranked = [(key, float(f)) for key, f in self.ranked(self.rel_freqs(counts))]
        se = self.se_bound(counts.shots)
        top_key, top_freq = ranked[0]
        runner_key, runner_freq = ranked[1] if len(ranked) > 1 else ('', 0.0)
        margin = top_freq - runner_freq

        if len(expected) == 1:
            target = expected[0]
            if top_key == target and runner_freq < top_freq:
                verdict_class = VerdictClass.CORRECT
            elif target in (top_key, runner_key) and (
                runner_freq == top_freq
                or self.equal_within(top_freq, runner_freq, counts.shots, k=self.runner_up_k)
            ):
                verdict_class = VerdictClass.UNEXPECTED_SUPERPOSITION
            else:
                verdict_class = VerdictClass.WRONG
        else:
            n = len(expected)
            leaders = {key for key, _ in ranked[:n]}
            straddles = len(ranked) > n and ranked[n - 1][1] == ranked[n][1]
            if straddles:
                verdict_class = VerdictClass.INCONCLUSIVE
            elif leaders == set(expected):
                verdict_class = VerdictClass.CORRECT
            else:
                verdict_class = VerdictClass.WRONG

        verdict = Verdict(
            verdict_class=verdict_class,
            top_states=tuple(ranked),
            expected=expected,
            shots=counts.shots,
            se=se,
            k_se=self.k_se,
            margin=margin,
        )
        logger.debug(
            f"Verdict for '{counts.circuit_name}': {verdict_class.value} "
            f"(top {top_key} at {top_freq:.3f}, margin {margin:.3f})"
        )
        return verdict

    def stationarity(self, records: Sequence[CountsTable]) -> StationarityReport:
        """
        Check that repeated runs of one circuit agree.

        Runs are stationary iff they share the same top state and every pair
        of top-state frequencies is equal within k SE, with SE taken from the
        smaller shot count of the pair. A single run is inconclusive.

        Args:
            records: Counts tables of the same circuit, in any order

        Returns:
            Report with per-run top states and pairwise deltas

        Raises:
            AnalysisError: If there are no records, or they come from
                different circuits or register widths
        """
        if not records:
            raise AnalysisError("Stationarity needs at least one run")
        names = {r.circuit_name for r in records if r.circuit_name}
        if len(names) > 1:
            raise AnalysisError(f"Runs come from different circuits: {sorted(names)}")
        widths = {r.width for r in records}
        if len(widths) > 1:
            raise AnalysisError(f"Runs have different outcome widths: {sorted(widths)}")

        runs = tuple((key, float(f)) for key, f in (self.ranked(self.rel_freqs(r))[0] for r in records))
        shots = [r.shots for r in records]
        threshold = self.k_se * self.se_bound(min(shots))

        if len(records) == 1:
            return StationarityReport(runs, (), Stationarity.INCONCLUSIVE, self.k_se, threshold)

        deltas = tuple(
            (i, j, abs(runs[i][1] - runs[j][1]))
            for i, j in combinations(range(len(runs)), 2)
        )
        same_top = len({key for key, _ in runs}) == 1
        all_close = all(
            self.equal_within(runs[i][1], runs[j][1], min(shots[i], shots[j]))
            for i, j, _ in deltas
        )
        verdict = Stationarity.STATIONARY if same_top and all_close else Stationarity.NON_STATIONARY
        report = StationarityReport(runs, deltas, verdict, self.k_se, threshold)
        logger.info(
            f"Stationarity over {len(records)} runs: {verdict.value} "
            f"(max delta {report.max_delta:.3f}, threshold {threshold:.3f})"
        )
        return report

    def predict_success(self, p_correct: float, gate_count: int) -> float:
        """
        Probability that none of ``gate_count`` gates fails: p_C^m.

        Raises:
            AnalysisError: If p_correct is outside (0, 1] or gate_count < 0
        """
        if not 0.0 < p_correct <= 1.0:
            raise AnalysisError(f"p_correct must lie in (0, 1], got {p_correct}")
        if gate_count < 0:
            raise AnalysisError(f"gate count must be non-negative, got {gate_count}")
        return float(p_correct ** gate_count)
