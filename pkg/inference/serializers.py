from django.conf import settings
from rest_framework import serializers

from core.fields import ArrayField, NullableFloatField
from .models import MAX_SEED, MIN_REPLICATES, BootstrapPlan, RankOrientation


class BootstrapPlanSerializer(serializers.Serializer):
    boot = serializers.IntegerField(required=False, min_value=MIN_REPLICATES)
    seed = serializers.IntegerField(required=False, min_value=0, max_value=MAX_SEED)
    nprime = serializers.IntegerField(required=False, allow_null=True, min_value=2)

    def create(self, validated_data):
        return BootstrapPlan(
            B=validated_data.get('boot') or settings.ERRSTAT_BOOTSTRAP_REPLICATES,
            seed=validated_data.get('seed', settings.ERRSTAT_DEFAULT_SEED),
            n_prime=validated_data.get('nprime'),
        )


class RankOptionsSerializer(serializers.Serializer):
    orientation = serializers.ChoiceField(choices=RankOrientation.choices, required=False, allow_null=True)


class PairComparisonSerializer(serializers.Serializer):
    method_1 = serializers.CharField()
    method_2 = serializers.CharField()
    stat = serializers.CharField()
    n_systems = serializers.IntegerField()
    B = serializers.IntegerField()
    s1 = NullableFloatField()
    s2 = NullableFloatField()
    u1 = NullableFloatField()
    u2 = NullableFloatField()
    u_diff = NullableFloatField()
    xi = NullableFloatField(allow_null=True)
    p_t = NullableFloatField(allow_null=True)
    xi_unc = NullableFloatField(allow_null=True)
    p_unc = NullableFloatField(allow_null=True)
    p_g = NullableFloatField()
    p_inv = NullableFloatField()
    n_zero_diffs = serializers.IntegerField()
    diff_lo = NullableFloatField()
    diff_hi = NullableFloatField()
    kappa = NullableFloatField()
    significant = serializers.BooleanField()
    degenerate = serializers.BooleanField()


class RankSummarySerializer(serializers.Serializer):
    method = serializers.CharField()
    mode = serializers.IntegerField()
    probability = NullableFloatField()
    interval_lo = serializers.IntegerField()
    interval_hi = serializers.IntegerField()


class RankMatrixSerializer(serializers.Serializer):
    stat = serializers.CharField()
    orientation = serializers.CharField()
    B = serializers.IntegerField()
    labels = serializers.ListField(child=serializers.CharField())
    p = ArrayField()
    reference_ranks = serializers.ListField(child=serializers.IntegerField())
    summary = RankSummarySerializer(many=True)
