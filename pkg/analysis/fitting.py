"""
Pure-state fitting for qbench.

Fits a two-qubit pure state, written in the basis of the four Bell-like
states, to measured correlators (F1, F2, F) over a set of analyzer angles.
Each analyzer measures A(theta) = cos(theta) Z - sin(theta) Y on its qubit,
which is what the singlet circuit's H U1(-theta) H rotation reads out.
"""

import logging
import math
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np
from django.conf import settings
from scipy.optimize import minimize

from .exceptions import AnalysisError, FitError
from .models import PureStateFit

logger = logging.getLogger(__name__)

MIN_POINTS = 4
RESIDUAL_TOLERANCE = 1e-8
# Starts whose residuals agree to this relative precision found the same minimum.
AGREEMENT = 1e-6

_SQRT_HALF = 1 / math.sqrt(2)
# Columns: singlet, (|00>-|11>)/sqrt2, (|00>+|11>)/sqrt2, (|01>+|10>)/sqrt2.
# Qubit 1 is the first tensor factor: index = 2 * s1 + s2.
BELL_BASIS = np.array(
    [
        [0, 1, 1, 0],
        [1, 0, 0, 1],
        [-1, 0, 0, 1],
        [0, -1, 1, 0],
    ],
    dtype=complex,
) * _SQRT_HALF

_I = np.eye(2, dtype=complex)
_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
_Z = np.array([[1, 0], [0, -1]], dtype=complex)

_OBSERVABLES = {
    'ZI': np.kron(_Z, _I),
    'YI': np.kron(_Y, _I),
    'IZ': np.kron(_I, _Z),
    'IY': np.kron(_I, _Y),
    'ZZ': np.kron(_Z, _Z),
    'ZY': np.kron(_Z, _Y),
    'YZ': np.kron(_Y, _Z),
    'YY': np.kron(_Y, _Y),
}


def _expectations(psi: np.ndarray) -> Dict[str, float]:
    return {name: float(np.real(np.vdot(psi, op @ psi))) for name, op in _OBSERVABLES.items()}


def _model(psi: np.ndarray, theta1: np.ndarray, theta2: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Predicted (E1, E2, E) of state ``psi`` at each angle pair."""
    ev = _expectations(psi)
    c1, s1 = np.cos(theta1), np.sin(theta1)
    c2, s2 = np.cos(theta2), np.sin(theta2)
    e1 = c1 * ev['ZI'] - s1 * ev['YI']
    e2 = c2 * ev['IZ'] - s2 * ev['IY']
    e = c1 * c2 * ev['ZZ'] - c1 * s2 * ev['ZY'] - s1 * c2 * ev['YZ'] + s1 * s2 * ev['YY']
    return e1, e2, e


def _coefficients(params: np.ndarray) -> Optional[np.ndarray]:
    """Seven reals (c0 real, c1..c3 complex) to a unit coefficient vector."""
    raw = np.array(
        [params[0], params[1] + 1j * params[2], params[3] + 1j * params[4], params[5] + 1j * params[6]],
        dtype=complex,
    )
    norm = np.linalg.norm(raw)
    if norm < 1e-12:
        return None
    return raw / norm


def correlators_of_state(
    coefficients: Sequence[complex], theta1: float, theta2: float
) -> Tuple[float, float, float]:
    """
    Exact (F1, F2, F) of a state given by its Bell-basis coefficients.

    Coefficients need not be normalised.
    """
    raw = np.asarray(coefficients, dtype=complex)
    norm = np.linalg.norm(raw)
    if raw.shape != (4,) or norm < 1e-12:
        raise AnalysisError("A state needs four coefficients, not all zero")
    psi = BELL_BASIS @ (raw / norm)
    e1, e2, e = _model(psi, np.array([theta1]), np.array([theta2]))
    return float(e1[0]), float(e2[0]), float(e[0])


def _validate(dataset: Iterable[Sequence[float]]) -> np.ndarray:
    rows = np.array([tuple(float(v) for v in row) for row in dataset], dtype=float)
    if rows.ndim != 2 or rows.shape[0] < MIN_POINTS or rows.shape[1] != 5:
        raise AnalysisError(
            f"A pure-state fit needs at least {MIN_POINTS} points of (theta1, theta2, F1, F2, F)"
        )
    if not np.all(np.isfinite(rows)):
        raise AnalysisError("Dataset contains non-finite values")
    distinct = {(round(t1, 12), round(t2, 12)) for t1, t2 in rows[:, :2]}
    if len(distinct) < MIN_POINTS:
        raise AnalysisError(
            f"A pure-state fit needs at least {MIN_POINTS} distinct angle pairs, got {len(distinct)}"
        )
    return rows


def _residual(params: np.ndarray, rows: np.ndarray) -> float:
    coefficients = _coefficients(params)
    if coefficients is None:
        return float(3 * len(rows) * 4)
    e1, e2, e = _model(BELL_BASIS @ coefficients, rows[:, 0], rows[:, 1])
    return float(np.sum((e1 - rows[:, 2]) ** 2 + (e2 - rows[:, 3]) ** 2 + (e - rows[:, 4]) ** 2))


def _fix_phase(coefficients: np.ndarray) -> np.ndarray:
    """Rotate the global phase so the singlet coefficient is real and non-negative."""
    c0 = coefficients[0]
    if abs(c0) > 1e-12:
        coefficients = coefficients * (abs(c0) / c0)
    coefficients[0] = abs(coefficients[0])
    return coefficients


def fit_pure_state(
    dataset: Iterable[Sequence[float]],
    starts: Optional[int] = None,
    seed: Optional[int] = None,
) -> PureStateFit:
    """
    Least-squares fit of a pure two-qubit state to correlator data.

    The first start is the singlet itself; the rest are random, each drawn
    from its own child of ``SeedSequence(seed)`` so the result does not
    depend on start order. BFGS with finite-difference gradients refines
    every start and the lowest residual wins. A minimum reached by two
    starts counts as converged even when BFGS reports no success.

    Args:
        dataset: Rows of (theta1, theta2, F1, F2, F)
        starts: Number of optimizer starts (default QBENCH_FIT_STARTS)
        seed: Seed of the random starts (default QBENCH_FIT_SEED)

    Returns:
        The fitted state, singlet coefficient real and non-negative

    Raises:
        AnalysisError: If the dataset has fewer than four distinct angle pairs
        FitError: If no start converged; the error carries the best attempt
    """
    rows = _validate(dataset)
    starts = int(starts if starts is not None else getattr(settings, 'QBENCH_FIT_STARTS', 12))
    seed = int(seed if seed is not None else getattr(settings, 'QBENCH_FIT_SEED', 0))
    if starts < 1:
        raise AnalysisError(f"starts must be at least 1, got {starts}")

    initial: List[np.ndarray] = [np.array([1.0, 0, 0, 0, 0, 0, 0])]
    for child in np.random.SeedSequence(seed).spawn(starts - 1):
        initial.append(np.random.default_rng(child).normal(size=7))

    best_params: Optional[np.ndarray] = None
    best_value = math.inf
    any_success = False
    history: List[float] = []
    for index, x0 in enumerate(initial):
        result = minimize(
            _residual,
            x0,
            args=(rows,),
            method='BFGS',
            options={'gtol': 1e-10, 'maxiter': 2000},
        )
        value = float(result.fun)
        history.append(value)
        any_success = any_success or bool(result.success)
        logger.debug(f"Fit start {index}: residual {value:.3e}, success {result.success}")
        if value < best_value:
            best_value, best_params = value, np.asarray(result.x)

    assert best_params is not None
    coefficients = _coefficients(best_params)
    if coefficients is None:
        raise FitError("Optimizer collapsed onto the zero vector")
    coefficients = _fix_phase(coefficients)

    agreeing = sum(1 for value in history if value - best_value <= AGREEMENT * max(best_value, 1e-12))
    converged = any_success or best_value <= RESIDUAL_TOLERANCE or agreeing >= 2
    fit = PureStateFit(
        coefficients=tuple(complex(c) for c in coefficients),  # type: ignore[arg-type]
        residual=best_value,
        converged=converged,
        starts=starts,
        history=history,
    )
    if not converged:
        logger.error(f"Pure-state fit did not converge after {starts} starts, best residual {best_value:.3e}")
        raise FitError(f"No start converged; best residual {best_value:.3e}", best=fit)

    logger.info(
        f"Fitted pure state over {len(rows)} points: magnitudes "
        f"{', '.join(f'{m:.4f}' for m in fit.magnitudes)}, residual {best_value:.3e}"
    )
    return fit
