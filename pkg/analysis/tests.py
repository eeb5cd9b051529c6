"""
Unit tests for analysis app.
"""

import math
from fractions import Fraction
from itertools import product
from types import SimpleNamespace
from typing import Dict, Iterable, List, Tuple
from unittest import mock

import numpy as np
from django.test import SimpleTestCase

from benchmarks.models import SingletParams
from benchmarks.singlet import correlators_from_frequencies, gen_singlet
from simulator.models import CountsTable
from simulator.services import SimulatorService

from .exceptions import AnalysisError, FitError
from .fitting import correlators_of_state, fit_pure_state
from .models import Stationarity, VerdictClass
from .services import AnalysisService

SHOTS = 8192
SWEEP = [k * math.pi / 8 for k in range(17)]


def table(
    frequencies: Dict[str, float],
    shots: int = SHOTS,
    avoid: Iterable[str] = (),
    name: str = 'case',
) -> CountsTable:
    """
    Counts reconstructed from reported frequencies.

    The shots left over are spread over other outcomes, each kept below the
    smallest reported count and never on an outcome in ``avoid``.
    """
    counts = {key: round(f * shots) for key, f in frequencies.items()}
    width = len(next(iter(frequencies)))
    cap = min(counts.values()) - 1
    remaining = shots - sum(counts.values())
    skip = set(counts) | set(avoid)
    for bits in product('01', repeat=width):
        key = ''.join(bits)
        if remaining <= 0:
            break
        if key in skip:
            continue
        counts[key] = min(cap, remaining)
        remaining -= counts[key]
    assert remaining == 0
    return CountsTable(shots, counts, circuit_name=name)


# Published hardware rows: (top two outcomes with frequencies, expected state, color).
ADDER_ROWS: List[Tuple[Dict[str, float], str, VerdictClass]] = [
    ({'1101': 0.275, '0001': 0.160}, '1110', VerdictClass.WRONG),
    ({'0101': 0.318, '0100': 0.150}, '0101', VerdictClass.CORRECT),
    ({'0001': 0.271, '1001': 0.169}, '0101', VerdictClass.WRONG),
    ({'0001': 0.277, '1001': 0.172}, '0101', VerdictClass.WRONG),
    ({'0010': 0.343, '0000': 0.221}, '0010', VerdictClass.CORRECT),
    ({'1001': 0.342, '1011': 0.341}, '1011', VerdictClass.UNEXPECTED_SUPERPOSITION),
    ({'1011': 0.315, '0001': 0.165}, '1011', VerdictClass.CORRECT),
    ({'1011': 0.225, '0001': 0.199}, '1001', VerdictClass.WRONG),
    ({'0001': 0.244, '1011': 0.210}, '1001', VerdictClass.WRONG),
    ({'1000': 0.493, '1100': 0.154}, '1000', VerdictClass.CORRECT),
]

IDENTITY_ROWS: List[Tuple[Dict[str, float], str, VerdictClass]] = [
    ({'0100': 0.661, '1100': 0.299}, '0100', VerdictClass.CORRECT),
    ({'0100': 0.700, '1100': 0.198}, '0100', VerdictClass.CORRECT),
    ({'0100': 0.642, '1100': 0.289}, '0100', VerdictClass.CORRECT),
    ({'0100': 0.580, '1100': 0.335}, '0100', VerdictClass.CORRECT),
    ({'0100': 0.628, '1100': 0.256}, '0100', VerdictClass.CORRECT),
    ({'10': 0.512, '00': 0.372}, '00', VerdictClass.WRONG),
    ({'10': 0.567, '00': 0.318}, '00', VerdictClass.WRONG),
    ({'10': 0.548, '00': 0.363}, '00', VerdictClass.WRONG),
    ({'10': 0.616, '00': 0.275}, '00', VerdictClass.WRONG),
    ({'10': 0.590, '00': 0.323}, '00', VerdictClass.WRONG),
    ({'10': 0.618, '00': 0.321}, '00', VerdictClass.WRONG),
    ({'01': 0.794, '00': 0.084}, '01', VerdictClass.CORRECT),
    ({'01': 0.797, '00': 0.088}, '01', VerdictClass.CORRECT),
    ({'01': 0.853, '00': 0.077}, '01', VerdictClass.CORRECT),
    ({'01': 0.849, '00': 0.068}, '01', VerdictClass.CORRECT),
    ({'111': 0.355, '110': 0.304}, '111', VerdictClass.CORRECT),
    ({'011': 0.262, '111': 0.238}, '111', VerdictClass.WRONG),
    ({'011': 0.250, '111': 0.237}, '111', VerdictClass.WRONG),
    ({'011': 0.358, '111': 0.131}, '111', VerdictClass.WRONG),
    ({'011': 0.368, '111': 0.128}, '111', VerdictClass.WRONG),
    ({'011': 0.347, '111': 0.139}, '111', VerdictClass.WRONG),
    ({'011': 0.374, '111': 0.150}, '111', VerdictClass.WRONG),
    ({'111': 0.304, '011': 0.157}, '111', VerdictClass.CORRECT),
    ({'111': 0.298, '011': 0.192}, '111', VerdictClass.CORRECT),
    ({'111': 0.223, '011': 0.156}, '111', VerdictClass.CORRECT),
    ({'011': 0.232, '000': 0.154}, '111', VerdictClass.WRONG),
    ({'011': 0.202, '000': 0.170}, '111', VerdictClass.WRONG),
]


def sweep_points() -> List[Tuple[float, float]]:
    """Both singlet sweeps: theta1 fixed at 0, and theta1 = theta2."""
    return [(0.0, theta) for theta in SWEEP] + [(theta, theta) for theta in SWEEP]


class FrequencyTest(SimpleTestCase):
    """Test cases for frequencies and the SE rule."""

    def setUp(self) -> None:
        """Set up test data."""
        self.service = AnalysisService(k_se=5)

    def test_rel_freqs_halves(self) -> None:
        """Test an even split gives exact halves."""
        freqs = self.service.rel_freqs(CountsTable(8192, {'00': 4096, '11': 4096}))
        self.assertEqual(freqs, {'00': Fraction(1, 2), '11': Fraction(1, 2)})

    def test_rel_freqs_sum_to_one_exactly(self) -> None:
        """Test thirds still sum to exactly one."""
        freqs = self.service.rel_freqs(CountsTable(3, {'0': 1, '1': 2}))
        self.assertEqual(sum(freqs.values()), 1)
        single = self.service.rel_freqs(CountsTable(7, {'101': 7}))
        self.assertEqual(single, {'101': 1})

    def test_rel_freqs_reconstructed_row(self) -> None:
        """Test a reconstructed 8192-shot row gives back its top frequency."""
        freqs = self.service.frequencies(table({'0100': 0.661}))
        self.assertAlmostEqual(freqs['0100'], 0.661, places=3)

    def test_se_bound(self) -> None:
        """Test SE at 8192 shots and its reported rounding."""
        se = self.service.se_bound(SHOTS)
        self.assertAlmostEqual(se, 0.01105, places=5)
        self.assertEqual(math.ceil(se * 1000) / 1000, 0.012)
        with self.assertRaises(AnalysisError):
            self.service.se_bound(0)

    def test_equal_within(self) -> None:
        """Test the five-SE window, including the vacuous small-N case."""
        self.assertTrue(self.service.equal_within(0.50, 0.55, SHOTS))
        self.assertFalse(self.service.equal_within(0.50, 0.57, SHOTS))
        self.assertTrue(self.service.equal_within(0.0, 0.5, 4))

    def test_predict_success(self) -> None:
        """Test p_C^m and its bounds."""
        self.assertAlmostEqual(self.service.predict_success(0.95, 20), 0.3585, places=4)
        self.assertEqual(self.service.predict_success(0.7, 0), 1.0)
        self.assertEqual(self.service.predict_success(0.5, 1), 0.5)
        self.assertLess(self.service.predict_success(0.9, 11), self.service.predict_success(0.9, 10))
        with self.assertRaises(AnalysisError):
            self.service.predict_success(0.0, 3)
        with self.assertRaises(AnalysisError):
            self.service.predict_success(1.2, 3)
        with self.assertRaises(AnalysisError):
            self.service.predict_success(0.9, -1)


class VerdictTest(SimpleTestCase):
    """Test cases for the correctness rule on hardware-like tables."""

    def setUp(self) -> None:
        """Set up test data."""
        self.service = AnalysisService(k_se=5)

    def classify(self, frequencies: Dict[str, float], expected: str) -> VerdictClass:
        counts = table(frequencies, avoid=[expected])
        return self.service.verdict(counts, {expected: 1.0}).verdict_class

    def test_correct_rows(self) -> None:
        """Test rows whose expected state is the strict top."""
        self.assertEqual(self.classify({'0101': 0.318, '0100': 0.150}, '0101'), VerdictClass.CORRECT)
        self.assertEqual(self.classify({'0010': 0.343, '0000': 0.221}, '0010'), VerdictClass.CORRECT)
        self.assertEqual(self.classify({'1011': 0.315, '0001': 0.165}, '1011'), VerdictClass.CORRECT)
        self.assertEqual(self.classify({'0100': 0.661}, '0100'), VerdictClass.CORRECT)

    def test_wrong_rows(self) -> None:
        """Test rows where the expected state is not among the leaders."""
        self.assertEqual(self.classify({'1101': 0.275, '0001': 0.160}, '1110'), VerdictClass.WRONG)
        self.assertEqual(self.classify({'0001': 0.244, '1011': 0.210}, '1001'), VerdictClass.WRONG)

    def test_published_adder_rows(self) -> None:
        """Test every published adder row gets its published color."""
        for frequencies, expected, verdict_class in ADDER_ROWS:
            with self.subTest(frequencies=frequencies, expected=expected):
                self.assertEqual(self.classify(frequencies, expected), verdict_class)

    def test_published_identity_rows(self) -> None:
        """Test every published identity-sequence row gets its published color."""
        for frequencies, expected, verdict_class in IDENTITY_ROWS:
            with self.subTest(frequencies=frequencies, expected=expected):
                self.assertEqual(self.classify(frequencies, expected), verdict_class)

    def test_runner_up_beyond_one_se_is_wrong(self) -> None:
        """Test an expected runner-up 0.013 behind the top is Wrong, not a superposition."""
        verdict = self.service.verdict(table({'011': 0.250, '111': 0.237}), {'111': 1.0})
        self.assertEqual(verdict.verdict_class, VerdictClass.WRONG)
        self.assertGreater(verdict.margin, verdict.se)
        self.assertLess(verdict.margin, 5 * verdict.se)

        relaxed = AnalysisService(k_se=5, runner_up_k=5).verdict(
            table({'011': 0.250, '111': 0.237}), {'111': 1.0}
        )
        self.assertEqual(relaxed.verdict_class, VerdictClass.UNEXPECTED_SUPERPOSITION)

    def test_close_leaders_without_expected_state_is_wrong(self) -> None:
        """Test two leaders within 5 SE do not rescue a missing expected state."""
        verdict = self.service.verdict(table({'1011': 0.225, '0001': 0.199}, avoid=['1001']), {'1001': 1.0})
        self.assertEqual(verdict.verdict_class, VerdictClass.WRONG)
        self.assertEqual(verdict.color, 'red')

    def test_unexpected_superposition_row(self) -> None:
        """Test the expected state as runner-up by 0.001 is flagged magenta."""
        verdict = self.service.verdict(table({'1001': 0.342, '1011': 0.341}), {'1011': 1.0})
        self.assertEqual(verdict.verdict_class, VerdictClass.UNEXPECTED_SUPERPOSITION)
        self.assertEqual(verdict.color, 'magenta')
        self.assertAlmostEqual(verdict.margin, 0.001, places=3)

    def test_bit_identical_tie(self) -> None:
        """Test an exact tie for the top with the expected state."""
        counts = CountsTable(100, {'01': 40, '10': 40, '11': 20})
        verdict = self.service.verdict(counts, {'10': 1.0})
        self.assertEqual(verdict.verdict_class, VerdictClass.UNEXPECTED_SUPERPOSITION)
        self.assertEqual(verdict.top_states[0][0], '01')

    def test_strict_top_is_correct_even_when_close(self) -> None:
        """Test only argmax identity matters when the expected state leads."""
        verdict = self.service.verdict(table({'1011': 0.342, '1001': 0.341}), {'1011': 1.0})
        self.assertEqual(verdict.verdict_class, VerdictClass.CORRECT)

    def test_multi_state_oracle(self) -> None:
        """Test set equality of the top |oracle| states."""
        oracle = {'00': 0.5, '11': 0.5}
        correct = CountsTable(8192, {'00': 4000, '11': 3900, '01': 292})
        wrong = CountsTable(8192, {'00': 4000, '01': 3900, '11': 292})
        straddle = CountsTable(8192, {'00': 4000, '11': 2000, '01': 2000, '10': 192})
        self.assertEqual(self.service.verdict(correct, oracle).verdict_class, VerdictClass.CORRECT)
        self.assertEqual(self.service.verdict(wrong, oracle).verdict_class, VerdictClass.WRONG)
        inconclusive = self.service.verdict(straddle, oracle)
        self.assertEqual(inconclusive.verdict_class, VerdictClass.INCONCLUSIVE)
        self.assertEqual(inconclusive.color, 'grey')

    def test_scaling_counts_keeps_argmax_verdict(self) -> None:
        """Test doubling every count leaves a clear verdict unchanged."""
        counts = CountsTable(100, {'00': 60, '01': 30, '11': 10})
        doubled = CountsTable(200, {key: 2 * v for key, v in counts.counts.items()})
        self.assertEqual(
            self.service.verdict(counts, {'00': 1.0}).verdict_class,
            self.service.verdict(doubled, {'00': 1.0}).verdict_class,
        )

    def test_top_states_sorted(self) -> None:
        """Test top states are by descending frequency, ties lexicographic."""
        verdict = self.service.verdict(CountsTable(6, {'11': 2, '00': 2, '10': 1, '01': 1}), {'00': 1.0})
        self.assertEqual([key for key, _ in verdict.top_states], ['00', '11', '01', '10'])
        document = verdict.to_dict()
        self.assertEqual(document['class'], 'UnexpectedSuperposition')
        self.assertEqual(document['shots'], 6)

    def test_oracle_without_support(self) -> None:
        """Test an empty oracle is rejected."""
        with self.assertRaises(AnalysisError):
            self.service.verdict(CountsTable(1, {'0': 1}), {'0': 0.0})


class StationarityTest(SimpleTestCase):
    """Test cases for run-to-run stationarity."""

    def setUp(self) -> None:
        """Set up test data."""
        self.service = AnalysisService(k_se=5)
        self.dated_runs = [table({'0100': f}, name='c01x8') for f in (0.661, 0.700, 0.642, 0.580, 0.628)]

    def test_dated_runs_are_non_stationary(self) -> None:
        """Test a stable top state with a 0.12 spread is non-stationary."""
        report = self.service.stationarity(self.dated_runs)
        self.assertEqual(report.verdict, Stationarity.NON_STATIONARY)
        self.assertAlmostEqual(report.max_delta, 0.12, places=3)
        self.assertEqual({key for key, _ in report.runs}, {'0100'})
        self.assertEqual(len(report.deltas), 10)

    def test_order_independent(self) -> None:
        """Test reversing the runs changes neither verdict nor spread."""
        forward = self.service.stationarity(self.dated_runs)
        backward = self.service.stationarity(list(reversed(self.dated_runs)))
        self.assertEqual(forward.verdict, backward.verdict)
        self.assertAlmostEqual(forward.max_delta, backward.max_delta, places=12)

    def test_identical_runs_are_stationary(self) -> None:
        """Test two identical tables are stationary."""
        report = self.service.stationarity([self.dated_runs[0], self.dated_runs[0]])
        self.assertEqual(report.verdict, Stationarity.STATIONARY)
        self.assertEqual(report.max_delta, 0.0)

    def test_different_top_states(self) -> None:
        """Test a moving top state is non-stationary."""
        other = table({'0110': 0.661}, name='c01x8')
        report = self.service.stationarity([self.dated_runs[0], other])
        self.assertEqual(report.verdict, Stationarity.NON_STATIONARY)

    def test_single_run_is_inconclusive(self) -> None:
        """Test one run cannot establish stationarity."""
        report = self.service.stationarity(self.dated_runs[:1])
        self.assertEqual(report.verdict, Stationarity.INCONCLUSIVE)
        self.assertEqual(report.to_dict()['verdict'], 'inconclusive')

    def test_rejects_mixed_records(self) -> None:
        """Test empty input, mixed circuits and mixed widths are errors."""
        with self.assertRaises(AnalysisError):
            self.service.stationarity([])
        with self.assertRaises(AnalysisError):
            self.service.stationarity([self.dated_runs[0], table({'0100': 0.661}, name='c34x8')])
        with self.assertRaises(AnalysisError):
            self.service.stationarity([self.dated_runs[0], table({'01000': 0.661}, name='c01x8')])


class PureStateFitTest(SimpleTestCase):
    """Test cases for the pure-state fit."""

    def setUp(self) -> None:
        """Set up test data."""
        self.tilted = (0.95, 0.31, 0.0, 0.0)

    def dataset(self, coefficients: Tuple[complex, ...]) -> List[Tuple[float, ...]]:
        return [(t1, t2) + correlators_of_state(coefficients, t1, t2) for t1, t2 in sweep_points()]

    def test_singlet_correlators(self) -> None:
        """Test the singlet gives F = -cos(theta1 - theta2) and no single-spin bias."""
        for t1, t2 in [(0.0, 0.0), (0.3, 1.4), (math.pi / 2, 0.0)]:
            f1, f2, f = correlators_of_state((1, 0, 0, 0), t1, t2)
            self.assertAlmostEqual(f, -math.cos(t1 - t2), places=12)
            self.assertAlmostEqual(f1, 0.0, places=12)
            self.assertAlmostEqual(f2, 0.0, places=12)

    def test_tilted_state_equal_angle_correlation(self) -> None:
        """Test the tilted state sits near -0.806 at equal angles."""
        _, _, f = correlators_of_state(self.tilted, 0.9, 0.9)
        self.assertAlmostEqual(f, -0.806, delta=0.005)

    def test_fit_simulated_singlet(self) -> None:
        """Test exact simulator data over both sweeps fits the singlet."""
        simulator = SimulatorService()
        data = []
        for t1, t2 in sweep_points():
            case = gen_singlet(SingletParams(t1, t2))
            data.append((t1, t2) + correlators_from_frequencies(simulator.run_exact(case.circuit)).as_tuple())
        fit = fit_pure_state(data, starts=8, seed=1)
        self.assertTrue(fit.converged)
        self.assertGreaterEqual(fit.magnitudes[0], 0.999)
        self.assertLess(fit.residual, 1e-8)
        self.assertEqual(fit.coefficients[0].imag, 0.0)

    def test_fit_recovers_tilted_state(self) -> None:
        """Test the fit recovers (0.95, 0.31) from forward-generated data."""
        fit = fit_pure_state(self.dataset(self.tilted), starts=12, seed=7)
        self.assertAlmostEqual(fit.magnitudes[0], 0.95, delta=0.01)
        self.assertAlmostEqual(fit.magnitudes[1], 0.31, delta=0.01)
        self.assertLess(fit.residual, 1e-8)
        self.assertAlmostEqual(sum(m ** 2 for m in fit.magnitudes), 1.0, places=9)
        self.assertGreaterEqual(fit.coefficients[0].real, 0.0)
        self.assertEqual(len(fit.to_dict()['coefficients']), 4)

    def test_fit_is_reproducible(self) -> None:
        """Test the same seed gives the same fit."""
        data = self.dataset(self.tilted)
        first = fit_pure_state(data, starts=4, seed=3)
        second = fit_pure_state(data, starts=4, seed=3)
        self.assertEqual(first.history, second.history)

    def test_underdetermined_dataset(self) -> None:
        """Test one point, or repeated angles, cannot be fitted."""
        with self.assertRaises(AnalysisError):
            fit_pure_state([(0.0, 0.0, 0.0, 0.0, -1.0)])
        with self.assertRaises(AnalysisError):
            fit_pure_state([(0.0, 0.0, 0.0, 0.0, -1.0)] * 6)

    def test_non_convergence_carries_best_fit(self) -> None:
        """Test a failed optimizer raises with the best attempt attached."""
        stalled = SimpleNamespace(fun=0.5, success=False, x=np.array([1.0, 0, 0, 0, 0, 0, 0]))
        with mock.patch('analysis.fitting.minimize', return_value=stalled):
            with self.assertRaises(FitError) as raised:
                fit_pure_state(self.dataset(self.tilted), starts=1, seed=0)
        best = raised.exception.best
        self.assertIsNotNone(best)
        assert best is not None
        self.assertFalse(best.converged)
        self.assertEqual(best.residual, 0.5)
