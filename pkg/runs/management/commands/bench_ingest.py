"""
Django management command to judge externally measured counts.
"""

import json
from typing import Any

from django.core.management.base import BaseCommand, CommandError

from analysis.models import VerdictClass
from runs.models import ColumnOrder, ExitCode
from runs.services import RunService


class Command(BaseCommand):
    """Management command to ingest a counts file against a benchmark case."""

    help = 'Apply the verdict rule to a counts JSON file from external hardware'

    def add_arguments(self, parser: Any) -> None:
        parser.add_argument('counts_file', help='Counts JSON document')
        parser.add_argument('--case', required=True, help='Benchmark case name')
        parser.add_argument('--columns', default=ColumnOrder.CANONICAL, choices=ColumnOrder.values)
        parser.add_argument('--out', default=None, help='Output directory (default QBENCH_OUT)')
        parser.add_argument('--k-se', type=float, default=None)

    def handle(self, *args: Any, **options: Any) -> None:
        """Handle the command execution."""
        service = RunService(out_dir=options['out'], k_se=options['k_se'])
        try:
            document = service.ingest(options['counts_file'], options['case'], columns=options['columns'])
        except (ValueError, OSError) as e:
            raise CommandError(str(e), returncode=ExitCode.INPUT_ERROR)

        self.stdout.write(json.dumps(document, indent=2, sort_keys=True))
        margin_se = document['margin'] / document['se']
        message = (
            f"{document['case']}: {document['class']} "
            f"(top {document['top_states'][0][0]} at {document['top_states'][0][1]:.3f}, "
            f"margin {margin_se:.1f} SE)"
        )
        if document['class'] != VerdictClass.CORRECT:
            self.stdout.write(self.style.WARNING(message))
            raise SystemExit(ExitCode.VERDICT_FAILURES)
        self.stdout.write(self.style.SUCCESS(message))
