"""
Django management command to report stored run history.
"""

import json
from typing import Any

from django.core.management.base import BaseCommand, CommandError

from runs.models import ExitCode
from runs.services import RunService


class Command(BaseCommand):
    """Management command to print per-case history and stationarity."""

    help = 'Report stored runs per case, optionally with a stationarity check'

    def add_arguments(self, parser: Any) -> None:
        parser.add_argument('history', nargs='?', default=None, help='Output directory to scan (default QBENCH_OUT)')
        parser.add_argument('--stationarity', action='store_true')
        parser.add_argument('--k-se', type=float, default=None)
        parser.add_argument('--json', action='store_true', help='Print the report as JSON')

    def handle(self, *args: Any, **options: Any) -> None:
        """Handle the command execution."""
        service = RunService(out_dir=options['history'], k_se=options['k_se'])
        try:
            report = service.report(stationarity=options['stationarity'])
        except ValueError as e:
            raise CommandError(str(e), returncode=ExitCode.INPUT_ERROR)

        if options['json']:
            self.stdout.write(json.dumps(report, indent=2, sort_keys=True))
        else:
            for case_name, entry in report['cases'].items():
                self.stdout.write(self.style.SUCCESS(case_name))
                for run in entry['runs']:
                    self.stdout.write(
                        f"  {run['timestamp']}  {run['backend']:<8} N={run['shots']:<6} "
                        f"{run['top_state']} {run['frequency']:.3f}  {run['verdict']}"
                    )
                if 'stationarity' in entry:
                    stationarity = entry['stationarity']
                    self.stdout.write(
                        f"  stationarity: {stationarity['verdict']} "
                        f"(max delta {stationarity['max_delta']:.3f}, threshold {stationarity['threshold']:.3f})"
                    )

        if report['exit_code'] != ExitCode.OK:
            raise SystemExit(report['exit_code'])
