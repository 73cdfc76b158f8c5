from dataclasses import dataclass

import numpy as np
from django.db import models

from core.exceptions import InvalidInput


class Statistic(models.TextChoices):
    MSE = 'mse', 'Mean signed error'
    MUE = 'mue', 'Mean unsigned error'
    RMSD = 'rmsd', 'Standard deviation of errors'
    Q = 'q', 'Quantile of absolute errors'


class QuantileMethod(models.TextChoices):
    HD = 'hd', 'Harrell-Davis'
    TYPE7 = 'type7', 'Hyndman-Fan type 7'


@dataclass(frozen=True)
class StatKind:
    """Which scalar statistic to compute on an error set.

    ``q`` and ``quantile_method`` only matter for ``Statistic.Q``.
    """

    kind: Statistic = Statistic.MUE
    q: float = 0.95
    quantile_method: QuantileMethod = QuantileMethod.HD

    def __post_init__(self):
        object.__setattr__(self, 'kind', Statistic(self.kind))
        object.__setattr__(self, 'quantile_method', QuantileMethod(self.quantile_method))
        if not 0.0 < self.q < 1.0:
            raise InvalidInput(f"quantile level must lie strictly inside (0, 1), got {self.q}")

    @classmethod
    def parse(cls, name, q=0.95, quantile_method=QuantileMethod.HD):
        """Accepts 'mse', 'mue', 'rmsd', 'q' and shorthands like 'q95' or 'Q90'."""
        name = str(name).strip().lower()
        if name.startswith('q') and name[1:].isdigit():
            q = int(name[1:]) / 100.0
            name = 'q'
        if name not in Statistic.values:
            raise InvalidInput(f"unknown statistic '{name}'; expected one of mse, mue, rmsd, q, q95")
        return cls(kind=Statistic(name), q=q, quantile_method=quantile_method)

    @property
    def label(self):
        if self.kind == Statistic.Q:
            return f"Q{round(self.q * 100):g}"
        return self.kind.name

    @property
    def is_quantile(self):
        return self.kind == Statistic.Q


@dataclass(frozen=True)
class WeightedMeanResult:
    """Weighted mean of an error set with its uncertainty and chi-squared check."""

    mean: float
    uncertainty: float
    weights: np.ndarray
    sigma2_model: float
    chi2w: float
    chi2_dof: int
    consistent: bool
    converged: bool = True
    iterations: int = 0
