from dataclasses import dataclass

import numpy as np
from django.db import models


class CorrelationMethod(models.TextChoices):
    SPEARMAN = 'spearman', 'Spearman (rank)'
    PEARSON = 'pearson', 'Pearson (product-moment)'


@dataclass(frozen=True)
class CorrMatrix:
    """Symmetric K x K correlation matrix with unit diagonal."""

    values: np.ndarray
    labels: tuple
    method: CorrelationMethod = CorrelationMethod.SPEARMAN

    def __post_init__(self):
        values = np.array(self.values, dtype=float, copy=True)
        values.setflags(write=False)
        object.__setattr__(self, 'values', values)
        object.__setattr__(self, 'labels', tuple(self.labels))
        object.__setattr__(self, 'method', CorrelationMethod(self.method))

    def __getitem__(self, pair):
        i, j = (self.labels.index(p) if isinstance(p, str) else p for p in pair)
        return float(self.values[i, j])
