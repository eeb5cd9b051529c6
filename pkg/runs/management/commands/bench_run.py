"""
Django management command to run a benchmark suite.
"""

import json
from typing import Any

from django.conf import settings
from django.core.management.base import BaseCommand, CommandError

from benchmarks.services import BenchmarkService
from runs.models import Backend, ExitCode
from runs.services import RunService
from simulator.models import NoiseChannel


class Command(BaseCommand):
    """Management command to generate, simulate and judge a suite."""

    help = 'Run a benchmark suite on the ideal or noisy simulator and store counts and verdicts'

    def add_arguments(self, parser: Any) -> None:
        parser.add_argument('--suite', required=True, choices=BenchmarkService().suite_names())
        parser.add_argument('--backend', default=Backend.IDEAL, choices=[Backend.IDEAL, Backend.NOISY])
        parser.add_argument('--shots', type=int, default=settings.QBENCH_SHOTS)
        parser.add_argument('--seed', type=int, default=settings.QBENCH_SEED)
        parser.add_argument('--p-correct', type=float, default=None, help='Per-gate success probability (noisy backend)')
        parser.add_argument('--channel', default=NoiseChannel.BIT_FLIP, choices=NoiseChannel.values)
        parser.add_argument('--coupling', default=None, help='Built-in device name or device JSON to route onto')
        parser.add_argument('--out', default=None, help='Output directory (default QBENCH_OUT)')
        parser.add_argument('--k-se', type=float, default=settings.QBENCH_K_SE)

    def handle(self, *args: Any, **options: Any) -> None:
        """Handle the command execution."""
        self.stdout.write(f"Running suite '{options['suite']}' on the {options['backend']} backend...")

        service = RunService(out_dir=options['out'], k_se=options['k_se'])
        try:
            summary = service.run_suite(
                options['suite'],
                backend=options['backend'],
                shots=options['shots'],
                seed=options['seed'],
                p_correct=options['p_correct'],
                channel=options['channel'],
                coupling=options['coupling'],
            )
        except ValueError as e:
            raise CommandError(str(e), returncode=ExitCode.INPUT_ERROR)

        results = summary['results']
        self.stdout.write(
            self.style.SUCCESS(
                f'Suite completed: {results["checked"]} cases checked, '
                f'{results["correct"]} correct, {results["failed"]} not correct'
            )
        )
        if results['errors'] > 0:
            self.stdout.write(self.style.WARNING(f'{results["errors"]} cases failed to run'))

        if summary['exit_code'] != ExitCode.OK:
            self.stdout.write(json.dumps({'failures': summary['failures']}, indent=2))
            raise SystemExit(summary['exit_code'])

        self.stdout.write(self.style.SUCCESS('All verdicts correct'))
