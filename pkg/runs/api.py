"""
Run API for qbench.
"""

import re
from typing import Any, Dict

from django.db.models import QuerySet
from rest_framework import serializers, viewsets

from .models import RunRecord

BITSTRING = re.compile(r'^[01]+$')


class RunRecordSerializer(serializers.ModelSerializer):
    class Meta:
        model = RunRecord
        fields = '__all__'


class RunRecordViewSet(viewsets.ReadOnlyModelViewSet):
    """Stored run records, filterable by ``case_name`` and ``suite``."""

    serializer_class = RunRecordSerializer

    def get_queryset(self) -> QuerySet[RunRecord]:
        queryset = RunRecord.objects.all()
        case_name = self.request.query_params.get('case_name')
        suite = self.request.query_params.get('suite')
        if case_name:
            queryset = queryset.filter(case_name=case_name)
        if suite:
            queryset = queryset.filter(suite=suite)
        return queryset


class CountsDocumentSerializer(serializers.Serializer):
    """
    Schema of a counts JSON document.

    ``counts`` maps equal-width bitstrings to non-negative integers that sum
    to ``shots``.
    """

    shots = serializers.IntegerField(min_value=1)
    counts = serializers.DictField(child=serializers.IntegerField(min_value=0), allow_empty=False)
    backend = serializers.CharField(required=False, default='external')
    date = serializers.CharField(required=False, allow_blank=True, default='')
    seed = serializers.IntegerField(required=False, allow_null=True, default=None)
    circuit_name = serializers.CharField(required=False, allow_blank=True, default='')
    metadata = serializers.DictField(required=False, default=dict)

    def validate_counts(self, value: Dict[str, int]) -> Dict[str, int]:
        bad = [key for key in value if not BITSTRING.match(key)]
        if bad:
            raise serializers.ValidationError(f"Keys must be bitstrings, got {bad[:3]}")
        widths = {len(key) for key in value}
        if len(widths) > 1:
            raise serializers.ValidationError(f"Bitstrings of mixed width: {sorted(widths)}")
        return value

    def validate(self, attrs: Dict[str, Any]) -> Dict[str, Any]:
        total = sum(attrs['counts'].values())
        if total != attrs['shots']:
            raise serializers.ValidationError(f"Counts sum to {total} but shots is {attrs['shots']}")
        return attrs
