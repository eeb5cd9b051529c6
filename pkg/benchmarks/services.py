"""
Benchmark services for qbench.
"""

import logging
from typing import Callable, Dict, Iterable, List, Mapping

from simulator.services import SimulatorService

from .adder import adder_cases
from .codes import code513_cases, surface_cases
from .exceptions import BenchmarkError
from .identity import identity_cases
from .models import BenchmarkCase, Suite
from .singlet import singlet_grid

logger = logging.getLogger(__name__)

ALL_SUITES = 'all'
ORACLE_MATCH_TOLERANCE = 1e-10

SUITE_BUILDERS: Dict[str, Callable[[], List[BenchmarkCase]]] = {
    Suite.SINGLET: singlet_grid,
    Suite.ADDER: adder_cases,
    Suite.IDENTITY: identity_cases,
    Suite.SURFACE: surface_cases,
    Suite.CODE513: code513_cases,
}


def total_variation(first: Mapping[str, float], second: Mapping[str, float]) -> float:
    """Half the L1 distance between two distributions over bitstrings."""
    keys = set(first) | set(second)
    return 0.5 * sum(abs(first.get(k, 0.0) - second.get(k, 0.0)) for k in keys)


class BenchmarkService:
    """
    Service for materialising benchmark suites.

    Generators are pure, so suites can be rebuilt at any time and cases
    looked up by name.
    """

    def __init__(self) -> None:
        """Initialize the benchmark service."""
        self.simulator = SimulatorService()

    def suite_names(self) -> List[str]:
        return [str(name) for name in SUITE_BUILDERS] + [ALL_SUITES]

    def build_suite(self, suite: str) -> List[BenchmarkCase]:
        """
        Generate every case of a suite.

        Args:
            suite: One of singlet, adder, identity, surface, code513 or all

        Returns:
            Cases in a fixed order, so case index is stable across runs

        Raises:
            BenchmarkError: If the suite name is unknown
        """
        if suite == ALL_SUITES:
            return [case for name in SUITE_BUILDERS for case in self.build_suite(name)]
        try:
            builder = SUITE_BUILDERS[suite]
        except KeyError:
            raise BenchmarkError(f"Unknown suite '{suite}', expected one of {self.suite_names()}") from None
        cases = builder()
        logger.info(f"Built suite '{suite}' with {len(cases)} cases")
        return cases

    def find_case(self, name: str) -> BenchmarkCase:
        """
        Look a case up by name across all suites.

        Raises:
            BenchmarkError: If no suite has a case of that name
        """
        for case in self.build_suite(ALL_SUITES):
            if case.name == name:
                return case
        raise BenchmarkError(f"No benchmark case named '{name}'")

    def check_oracles(self, cases: Iterable[BenchmarkCase]) -> Dict[str, int]:
        """
        Compare each case's oracle with the exact simulated distribution.

        Args:
            cases: Cases to check

        Returns:
            Dictionary with checked, matched, mismatched and errors counts
        """
        results = {
            'checked': 0,
            'matched': 0,
            'mismatched': 0,
            'errors': 0,
        }
        for case in cases:
            try:
                results['checked'] += 1
                distance = total_variation(self.simulator.run_exact(case.circuit), case.oracle)
                if distance <= ORACLE_MATCH_TOLERANCE:
                    results['matched'] += 1
                else:
                    results['mismatched'] += 1
                    logger.warning(f"Oracle of '{case.name}' is {distance:.3e} away from exact simulation")
            except Exception as e:
                logger.error(f"Error checking oracle of '{case.name}': {e}")
                results['errors'] += 1

        logger.info(f"Oracle check completed: {results}")
        return results
