"""
Django admin for runs app.
"""

from typing import Any, Optional

from django.contrib import admin
from django.http import HttpRequest
from django.utils.html import format_html

from analysis.models import VerdictClass

from .models import RunRecord


@admin.register(RunRecord)
class RunRecordAdmin(admin.ModelAdmin):
    """Read-only admin interface for RunRecord model."""

    list_display = [
        'case_name',
        'suite',
        'backend',
        'shots',
        'verdict_display',
        'created_at',
    ]

    list_filter = ['suite', 'backend', 'verdict_class', 'created_at']
    search_fields = ['case_name']
    readonly_fields = [field.name for field in RunRecord._meta.fields]

    fieldsets = (
        ('Case', {
            'fields': ('suite', 'case_name', 'params')
        }),
        ('Execution', {
            'fields': ('backend', 'shots', 'seed', 'counts_path')
        }),
        ('Verdict', {
            'fields': ('verdict_class', 'top_state')
        }),
        ('System Information', {
            'fields': ('id', 'tool_version', 'created_at'),
            'classes': ('collapse',)
        }),
    )

    def verdict_display(self, obj: RunRecord) -> str:
        """Display the verdict in its report color."""
        verdict = VerdictClass(obj.verdict_class)
        return format_html('<span style="color: {};">{}</span>', verdict.color, verdict.label)
    verdict_display.short_description = 'Verdict'  # type: ignore[attr-defined]

    def has_add_permission(self, request: HttpRequest) -> bool:
        return False

    def has_change_permission(self, request: HttpRequest, obj: Optional[Any] = None) -> bool:
        return False

    def has_delete_permission(self, request: HttpRequest, obj: Optional[Any] = None) -> bool:
        return False
