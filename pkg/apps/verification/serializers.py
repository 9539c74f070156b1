from typing import Any, Dict

from rest_framework import serializers

from .models import CheckReport, LtsStats


class LtsStatsSerializer(serializers.Serializer):
    states = serializers.IntegerField()
    transitions = serializers.IntegerField()
    max_depth = serializers.IntegerField()
    acyclic = serializers.BooleanField()


class CheckReportSerializer(serializers.Serializer):
    """
    Documento legible por máquina de un veredicto:
    `{property, holds, stats, counterexample}` con las etiquetas del contraejemplo
    """
    property = serializers.CharField()
    holds = serializers.BooleanField()
    stats = LtsStatsSerializer()
    counterexample = serializers.ListField(child=serializers.CharField(), allow_null=True)

    def to_representation(self, instance: CheckReport) -> Dict[str, Any]:
        stats: LtsStats = instance.stats
        counterexample = None
        if instance.counterexample is not None:
            counterexample = [str(label) for label in instance.counterexample.flat_labels()]
        return {
            'property': instance.property.value,
            'holds': instance.holds,
            'stats': LtsStatsSerializer(stats).data,
            'counterexample': counterexample,
        }
