from django.conf import settings
from rest_framework import serializers

from core.exceptions import InvalidInput
from core.fields import NullableFloatField
from .models import QuantileMethod, StatKind


class StatKindSerializer(serializers.Serializer):
    """Statistic options as given on the command line: --stat, --q, --quantile-method."""

    stat = serializers.CharField(default='mue')
    q = serializers.FloatField(required=False)
    quantile_method = serializers.ChoiceField(choices=QuantileMethod.choices, required=False)

    def validate_q(self, value):
        if not 0.0 < value < 1.0:
            raise serializers.ValidationError("Quantile level must lie strictly between 0 and 1.")
        return value

    def create(self, validated_data):
        try:
            return StatKind.parse(
                validated_data['stat'],
                q=validated_data.get('q', settings.ERRSTAT_QUANTILE_LEVEL),
                quantile_method=validated_data.get('quantile_method', settings.ERRSTAT_QUANTILE_METHOD),
            )
        except InvalidInput as exc:
            raise serializers.ValidationError({'stat': [str(exc)]})


class WeightedMeanSerializer(serializers.Serializer):
    mean = NullableFloatField()
    uncertainty = NullableFloatField()
    sigma2_model = NullableFloatField()
    chi2w = NullableFloatField()
    chi2_dof = serializers.IntegerField()
    consistent = serializers.BooleanField()
    converged = serializers.BooleanField()
    iterations = serializers.IntegerField()
