from typing import Any, Dict

from rest_framework import serializers

from .models import ReconfigTrigger, ReconfigurationStrategy, Scenario, StrategyVariant


class StrategySerializer(serializers.Serializer):
    """
    Serializer para ReconfigurationStrategy.
    """
    variant = serializers.ChoiceField(choices=[variant.value for variant in StrategyVariant])
    reconfig_steps = serializers.IntegerField(min_value=0, default=0)

    def to_representation(self, instance: ReconfigurationStrategy) -> Dict[str, Any]:
        return {'variant': instance.variant.value, 'reconfig_steps': instance.reconfig_steps}


class ScenarioSerializer(serializers.Serializer):
    """
    Serializer para Scenario: `{arrival_budget, strategy: {variant, reconfig_steps}, reconfig_trigger}`
    """
    arrival_budget = serializers.IntegerField(min_value=0)
    strategy = StrategySerializer()
    reconfig_trigger = serializers.CharField(default='Nondeterministic')

    @staticmethod
    def validate_reconfig_trigger(value: str) -> str:
        try:
            ReconfigTrigger.parse(value)
        except ValueError:
            raise serializers.ValidationError('Debe ser `Nondeterministic` o `AfterNAccepts(n)`.')
        return value

    def validate(self, attrs: Dict[str, Any]) -> Dict[str, Any]:
        problems = self.build(attrs).problems()
        if problems:
            raise serializers.ValidationError({'non_field_errors': problems})
        return attrs

    def to_representation(self, instance: Scenario) -> Dict[str, Any]:
        return {
            'arrival_budget': instance.arrival_budget,
            'strategy': StrategySerializer(instance.strategy).data,
            'reconfig_trigger': str(instance.reconfig_trigger),
        }

    @staticmethod
    def build(validated_data: Dict[str, Any]) -> Scenario:
        strategy = validated_data['strategy']
        return Scenario(
            arrival_budget=validated_data['arrival_budget'],
            strategy=ReconfigurationStrategy(StrategyVariant(strategy['variant']), strategy['reconfig_steps']),
            reconfig_trigger=ReconfigTrigger.parse(validated_data['reconfig_trigger']),
        )

    def create(self, validated_data: Dict[str, Any]) -> Scenario:
        return self.build(validated_data)
