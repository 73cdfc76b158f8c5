from rest_framework import serializers

from core.fields import ArrayField


class CorrMatrixSerializer(serializers.Serializer):
    method = serializers.CharField()
    labels = serializers.ListField(child=serializers.CharField())
    values = ArrayField()
