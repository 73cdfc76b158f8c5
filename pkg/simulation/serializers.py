from django.conf import settings
from rest_framework import serializers

from core.exceptions import InvalidInput
from core.fields import NullableFloatField
from estimators.models import QuantileMethod, StatKind
from inference.models import MAX_SEED, MIN_REPLICATES
from .models import MIN_REPETITIONS, MIN_SIZE, SCENARIOS, StudyConfig


class StudyConfigSerializer(serializers.Serializer):
    n = serializers.ListField(child=serializers.IntegerField(min_value=MIN_SIZE), min_length=1)
    rho = serializers.ListField(child=serializers.FloatField(min_value=-1.0, max_value=1.0), min_length=1)
    reps = serializers.IntegerField(min_value=MIN_REPETITIONS, default=1000)
    boot = serializers.IntegerField(min_value=MIN_REPLICATES, required=False)
    scenarios = serializers.ListField(
        child=serializers.ChoiceField(choices=sorted(SCENARIOS)), min_length=1, default=['normal'],
    )
    stats = serializers.ListField(child=serializers.CharField(), min_length=1, default=['mue', 'q95'])
    seed = serializers.IntegerField(min_value=0, max_value=MAX_SEED, required=False)
    q = serializers.FloatField(required=False)
    quantile_method = serializers.ChoiceField(choices=QuantileMethod.choices, required=False)

    def validate_q(self, value):
        if not 0.0 < value < 1.0:
            raise serializers.ValidationError("Quantile level must lie strictly between 0 and 1.")
        return value

    def validate(self, data):
        level = data.get('q', settings.ERRSTAT_QUANTILE_LEVEL)
        method = data.get('quantile_method', settings.ERRSTAT_QUANTILE_METHOD)
        try:
            data['stats'] = [
                StatKind.parse(name, q=level, quantile_method=method)
                for name in data['stats']
            ]
        except InvalidInput as exc:
            raise serializers.ValidationError({'stats': [str(exc)]})
        return data

    def create(self, validated_data):
        return StudyConfig(
            n_values=validated_data['n'],
            rho_values=validated_data['rho'],
            M=validated_data['reps'],
            B=validated_data.get('boot') or settings.ERRSTAT_BOOTSTRAP_REPLICATES,
            scenarios=[SCENARIOS[name] for name in validated_data['scenarios']],
            seed=validated_data.get('seed', settings.ERRSTAT_DEFAULT_SEED),
            stats=validated_data['stats'],
            quantile_level=validated_data.get('q', settings.ERRSTAT_QUANTILE_LEVEL),
        )


class StudyConfigEchoSerializer(serializers.Serializer):
    """The effective configuration of a study, as echoed in its JSON report."""

    n_values = serializers.ListField(child=serializers.IntegerField())
    rho_values = serializers.ListField(child=serializers.FloatField())
    M = serializers.IntegerField()
    B = serializers.IntegerField()
    scenarios = serializers.SerializerMethodField()
    stats = serializers.SerializerMethodField()
    seed = serializers.IntegerField()
    quantile_level = serializers.FloatField()

    def get_scenarios(self, obj):
        return [s.name for s in obj.scenarios]

    def get_stats(self, obj):
        return [kind.label for kind in obj.stats]


class CorrTransferRowSerializer(serializers.Serializer):
    scenario = serializers.CharField()
    n = serializers.IntegerField()
    rho = serializers.FloatField()
    statistic = serializers.CharField()
    cor = NullableFloatField()
    lo = NullableFloatField()
    hi = NullableFloatField()


class Type1RowSerializer(serializers.Serializer):
    statistic = serializers.CharField()
    scenario = serializers.CharField()
    n = serializers.IntegerField()
    rho = serializers.FloatField()
    M = serializers.IntegerField()
    rejections = serializers.IntegerField()
    alpha = NullableFloatField()
    se = NullableFloatField()


class QuantileStudyRowSerializer(serializers.Serializer):
    mode = serializers.CharField()
    n = serializers.IntegerField()
    estimator = serializers.CharField()
    q05 = NullableFloatField()
    q25 = NullableFloatField()
    q50 = NullableFloatField()
    q75 = NullableFloatField()
    q95 = NullableFloatField()
    n_distinct = serializers.IntegerField()
    reference = NullableFloatField()


class PValueSummarySerializer(serializers.Serializer):
    n = serializers.IntegerField()
    rho = serializers.FloatField()
    repetitions = serializers.IntegerField()
    mean_p_t = NullableFloatField()
    mean_p_g_mse = NullableFloatField()
    mean_abs_deviation = NullableFloatField()
    median_p_g_hd = NullableFloatField()
    median_p_g_type7 = NullableFloatField()
