"""Serializer fields for numpy-backed report values.

JSON reports never carry NaN or infinities: undefined values come out as null.
"""
import math

import numpy as np
from rest_framework import serializers


class NullableFloatField(serializers.FloatField):
    def to_representation(self, value):
        value = float(value)
        return value if math.isfinite(value) else None


class ArrayField(serializers.Field):
    """numpy array as (nested) lists of floats."""

    def __init__(self, **kwargs):
        kwargs.setdefault('read_only', True)
        super().__init__(**kwargs)

    def to_representation(self, value):
        arr = np.asarray(value, dtype=float)
        return np.where(np.isfinite(arr), arr, None).tolist()


class IntArrayField(ArrayField):
    def to_representation(self, value):
        return np.asarray(value).astype(int).tolist()
