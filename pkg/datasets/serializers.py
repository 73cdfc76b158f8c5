import codecs

from rest_framework import serializers

from .models import TableFormat


class TableFormatSerializer(serializers.Serializer):
    delimiter = serializers.CharField(max_length=1, default=',', trim_whitespace=False)
    comment = serializers.CharField(max_length=1, default='#')
    encoding = serializers.CharField(default='utf-8')

    def validate_encoding(self, value):
        try:
            codecs.lookup(value)
        except LookupError:
            raise serializers.ValidationError(f"Unknown encoding '{value}'.")
        return value

    def create(self, validated_data):
        return TableFormat(**validated_data)


class BenchmarkSummarySerializer(serializers.Serializer):
    """What was loaded: size, method columns and which uncertainties are present."""

    n_systems = serializers.IntegerField()
    method_names = serializers.ListField(child=serializers.CharField())
    has_uncertainty = serializers.BooleanField()

