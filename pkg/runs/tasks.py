"""
Celery tasks for qbench.
"""

import logging
from typing import Any, Dict

from celery import shared_task

from .services import RunService

logger = logging.getLogger(__name__)


@shared_task(bind=True)  # type: ignore[misc]
def execute_case(self: Any, suite: str, index: int, out_dir: str, k_se: float, options: Dict[str, Any]) -> Dict[str, Any]:
    """
    Celery task to execute, judge and store one benchmark case.

    The case seed is derived from the suite seed and ``index``, so the
    counts do not depend on which worker picks the task up.

    Args:
        suite: Suite name
        index: Position of the case in the suite
        out_dir: Output directory
        k_se: SE multiplier of the verdict rule
        options: backend, shots, seed, stamp, p_correct, channel and coupling

    Returns:
        JSON-ready outcome of the case
    """
    logger.info(f"Starting case {index} of suite '{suite}'")

    try:
        outcome = RunService(out_dir=out_dir, k_se=k_se).run_case(suite, index, **options)
        logger.info(f"Case '{outcome['case']}' completed: {outcome['verdict']}")
        return outcome

    except OSError as e:
        logger.error(f"Error writing case {index} of suite '{suite}': {e}")
        raise self.retry(exc=e, countdown=5, max_retries=3)
