"""
Run models for qbench.
"""

from __future__ import annotations

import uuid
from typing import Any

from django.core.validators import MinValueValidator
from django.db import models

from analysis.models import VerdictClass
from benchmarks.models import Suite

from .exceptions import AppendOnlyError


class Backend(models.TextChoices):
    """Where the counts came from."""
    IDEAL = 'ideal', 'Ideal simulator'
    NOISY = 'noisy', 'Noisy simulator'
    EXTERNAL = 'external', 'External hardware'


class ColumnOrder(models.TextChoices):
    """Bit order of the keys in an ingested counts file."""
    CANONICAL = 'canonical', 'Highest measured bit first'
    DISPLAY = 'display', "The case's report column order"


class ExitCode(models.IntegerChoices):
    """Process exit codes of the bench commands."""
    OK = 0, 'All verdicts correct'
    VERDICT_FAILURES = 1, 'Some verdicts not correct'
    INPUT_ERROR = 2, 'Input or schema error'


class RunRecord(models.Model):
    """
    One executed or ingested benchmark case.

    The counts themselves live on disk under the output directory; the
    record points at them. Records are append-only so dated runs of the
    same case can be compared later.
    """

    id: models.UUIDField = models.UUIDField(
        primary_key=True,
        default=uuid.uuid4,
        editable=False
    )

    suite: models.CharField = models.CharField(
        max_length=20,
        choices=Suite.choices,
        help_text="Benchmark family of the case"
    )

    case_name: models.CharField = models.CharField(
        max_length=255,
        help_text="Benchmark case name"
    )

    params: models.JSONField = models.JSONField(
        default=dict,
        blank=True,
        help_text="Generator parameters of the case"
    )

    backend: models.CharField = models.CharField(
        max_length=20,
        choices=Backend.choices,
        default=Backend.IDEAL,
        help_text="Source of the counts"
    )

    shots: models.PositiveIntegerField = models.PositiveIntegerField(
        validators=[MinValueValidator(1)],
        help_text="Number of shots N"
    )

    seed: models.BigIntegerField = models.BigIntegerField(
        null=True,
        blank=True,
        help_text="Seed the counts were sampled with, if simulated"
    )

    counts_path: models.CharField = models.CharField(
        max_length=1024,
        help_text="Path of counts.json"
    )

    verdict_class: models.CharField = models.CharField(
        max_length=30,
        choices=VerdictClass.choices,
        help_text="Verdict of the counts against the case oracle"
    )

    top_state: models.JSONField = models.JSONField(
        default=list,
        blank=True,
        help_text="Most frequent outcome and its frequency"
    )

    tool_version: models.CharField = models.CharField(
        max_length=20,
        help_text="qbench version that wrote the record"
    )

    created_at: models.DateTimeField = models.DateTimeField(auto_now_add=True)

    class Meta:
        db_table = 'run_records'
        ordering = ['case_name', 'created_at']
        verbose_name = 'Run record'
        verbose_name_plural = 'Run records'
        indexes = [
            models.Index(fields=['case_name', 'created_at'], name='run_records_case_na_5f2c1e_idx'),
            models.Index(fields=['suite'], name='run_records_suite_8a13d0_idx'),
        ]

    def __str__(self) -> str:
        return f"{self.case_name} @ {self.created_at}: {self.verdict_class}"

    def save(self, *args: Any, **kwargs: Any) -> None:
        if not self._state.adding:
            raise AppendOnlyError(f"Run record {self.id} is append-only")
        super().save(*args, **kwargs)

    def delete(self, *args: Any, **kwargs: Any) -> Any:
        raise AppendOnlyError(f"Run record {self.id} is append-only")

    @property
    def is_correct(self) -> bool:
        return self.verdict_class == VerdictClass.CORRECT
