"""
Django management command to route a QASM file onto a device.
"""

from typing import Any

from django.core.management.base import BaseCommand, CommandError

from runs.models import ExitCode
from runs.services import RunService


class Command(BaseCommand):
    """Management command to transpile a circuit for a coupling map."""

    help = 'Route a QASM circuit onto a device coupling map'

    def add_arguments(self, parser: Any) -> None:
        parser.add_argument('input', help='Input .qasm file')
        parser.add_argument('output', help='Output .qasm file')
        parser.add_argument('--coupling', required=True, help='Built-in device name or device JSON')
        parser.add_argument('--verify', action='store_true', help='Check unitary equivalence up to the final layout')

    def handle(self, *args: Any, **options: Any) -> None:
        """Handle the command execution."""
        try:
            result = RunService().transpile(
                options['input'], options['coupling'], options['output'], verify=options['verify']
            )
        except (ValueError, OSError) as e:
            raise CommandError(str(e), returncode=ExitCode.INPUT_ERROR)

        if result['passthrough']:
            self.stdout.write(self.style.SUCCESS(f"{options['input']} already obeys the coupling map; copied"))
        else:
            self.stdout.write(self.style.SUCCESS(f"Routed with {result['metadata']['swaps']} SWAPs"))
        self.stdout.write(f"Layout: {result['layout']}")
        if result['verified']:
            self.stdout.write(self.style.SUCCESS('Equivalence verified'))
