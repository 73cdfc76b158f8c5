from rest_framework import serializers

from core.fields import ArrayField, IntArrayField, NullableFloatField


class SipReportSerializer(serializers.Serializer):
    labels = serializers.ListField(child=serializers.CharField())
    n_systems = serializers.IntegerField()
    sip = ArrayField()
    mg = ArrayField()
    ml = ArrayField()
    msip = ArrayField()
    ties = IntArrayField()
    ordered_labels = serializers.ListField(child=serializers.CharField())


class IntervalEstimateSerializer(serializers.Serializer):
    value = NullableFloatField(allow_null=True)
    lo = NullableFloatField(allow_null=True)
    hi = NullableFloatField(allow_null=True)


class EcdfCurveSerializer(serializers.Serializer):
    system_ids = serializers.ListField(child=serializers.CharField())
    values = ArrayField()
    ecdf = ArrayField()
    band_lo = ArrayField()
    band_hi = ArrayField()


class DeltaEcdfReportSerializer(serializers.Serializer):
    method_1 = serializers.CharField()
    method_2 = serializers.CharField()
    B = serializers.IntegerField()
    sip = IntervalEstimateSerializer()
    mg = IntervalEstimateSerializer()
    ml = IntervalEstimateSerializer()
    delta_mue = IntervalEstimateSerializer()
    uncertainty_bar = NullableFloatField(allow_null=True)
    curve = EcdfCurveSerializer()
