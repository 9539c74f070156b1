from typing import Any, Dict

from rest_framework import serializers

from .models import MAX_ACTIVITY_ID_LENGTH, Activity, ActivityKind, Configuration, WorkflowSpec


class ActivitySerializer(serializers.Serializer):
    """
    Serializer para Activity.
    Las decisiones escriben sus sucesores como pares {resultado: destino};
    el resto de actividades como lista de identificadores.
    """
    id = serializers.CharField(max_length=MAX_ACTIVITY_ID_LENGTH, trim_whitespace=False)
    kind = serializers.ChoiceField(choices=[kind.value for kind in ActivityKind])
    successors = serializers.JSONField(required=False, default=list)

    def validate(self, attrs: Dict[str, Any]) -> Dict[str, Any]:
        successors = attrs.get('successors')
        if attrs['kind'] == ActivityKind.DECISION.value:
            if not isinstance(successors, dict) or not all(
                    isinstance(k, str) and isinstance(v, str) for k, v in successors.items()):
                raise serializers.ValidationError(
                    {'successors': 'Una decisión requiere pares {resultado: destino}.'})
        elif not isinstance(successors, list) or not all(isinstance(s, str) for s in successors):
            raise serializers.ValidationError(
                {'successors': 'Se espera una lista de identificadores de actividad.'})
        return attrs

    def to_representation(self, instance: Activity) -> Dict[str, Any]:
        if instance.kind is ActivityKind.DECISION:
            successors: Any = dict(zip(instance.outcomes, instance.successors))
        else:
            successors = list(instance.successors)
        return {'id': instance.id, 'kind': instance.kind.value, 'successors': successors}

    @staticmethod
    def build(validated_data: Dict[str, Any]) -> Activity:
        kind = ActivityKind(validated_data['kind'])
        successors = validated_data.get('successors') or []
        if kind is ActivityKind.DECISION:
            return Activity(validated_data['id'], kind, tuple(successors.values()), tuple(successors.keys()))
        return Activity(validated_data['id'], kind, tuple(successors))


class ConfigurationSerializer(serializers.Serializer):
    """
    Serializer para Configuration: documento con `id`, `entry` y `activities`
    """
    id = serializers.CharField(max_length=MAX_ACTIVITY_ID_LENGTH)
    entry = serializers.CharField(max_length=MAX_ACTIVITY_ID_LENGTH, trim_whitespace=False)
    activities = ActivitySerializer(many=True, allow_empty=False)

    def to_representation(self, instance: Configuration) -> Dict[str, Any]:
        return {
            'id': instance.id,
            'entry': instance.entry,
            'activities': [ActivitySerializer(activity).data for activity in instance.activities],
        }

    @staticmethod
    def build(validated_data: Dict[str, Any]) -> Configuration:
        return Configuration(
            id=validated_data['id'],
            entry=validated_data['entry'],
            activities=tuple(ActivitySerializer.build(item) for item in validated_data['activities']),
        )

    def create(self, validated_data: Dict[str, Any]) -> Configuration:
        return self.build(validated_data)


class WorkflowSpecSerializer(serializers.Serializer):
    """
    Serializer para el par de configuraciones antigua (`old`) y nueva (`new`)
    """
    old = ConfigurationSerializer()
    new = ConfigurationSerializer()

    def validate(self, attrs: Dict[str, Any]) -> Dict[str, Any]:
        if attrs['old']['id'] == attrs['new']['id']:
            raise serializers.ValidationError({'new': 'Las configuraciones deben tener identificadores distintos.'})
        return attrs

    def to_representation(self, instance: WorkflowSpec) -> Dict[str, Any]:
        return {
            'old': ConfigurationSerializer(instance.old).data,
            'new': ConfigurationSerializer(instance.new).data,
        }

    def create(self, validated_data: Dict[str, Any]) -> WorkflowSpec:
        return WorkflowSpec(
            old=ConfigurationSerializer.build(validated_data['old']),
            new=ConfigurationSerializer.build(validated_data['new']),
        )
