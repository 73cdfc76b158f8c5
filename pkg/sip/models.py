from dataclasses import dataclass

import numpy as np


def _frozen(values, dtype=float):
    arr = np.array(values, dtype=dtype, copy=True)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class SipReport:
    """SIP, mean gain and mean loss for every ordered pair of methods.

    Undefined MG/ML cells (no system improves) are NaN in the arrays and
    ``null`` once serialized.
    """

    labels: tuple
    n_systems: int
    sip: np.ndarray
    mg: np.ndarray
    ml: np.ndarray
    msip: np.ndarray
    ties: np.ndarray
    order: tuple

    def __post_init__(self):
        for name in ('sip', 'mg', 'ml', 'msip'):
            object.__setattr__(self, name, _frozen(getattr(self, name)))
        object.__setattr__(self, 'ties', _frozen(self.ties, dtype=int))
        object.__setattr__(self, 'labels', tuple(self.labels))
        object.__setattr__(self, 'order', tuple(int(i) for i in self.order))

    @property
    def ordered_labels(self):
        return tuple(self.labels[i] for i in self.order)


@dataclass(frozen=True)
class IntervalEstimate:
    """A point value with its 95 % percentile bootstrap interval."""

    value: float
    lo: float
    hi: float


@dataclass(frozen=True)
class EcdfCurve:
    """Step ECDF of a sample with a pointwise 95 % bootstrap band."""

    values: np.ndarray
    ecdf: np.ndarray
    band_lo: np.ndarray
    band_hi: np.ndarray
    system_ids: tuple

    def __post_init__(self):
        for name in ('values', 'ecdf', 'band_lo', 'band_hi'):
            object.__setattr__(self, name, _frozen(getattr(self, name)))
        object.__setattr__(self, 'system_ids', tuple(self.system_ids))


@dataclass(frozen=True)
class DeltaEcdfReport:
    """ECDF of Delta_k = |e_k(M_i)| - |e_k(M_j)| with annotated SIP, MG, ML and Delta MUE."""

    method_1: str
    method_2: str
    curve: EcdfCurve
    sip: IntervalEstimate
    mg: IntervalEstimate
    ml: IntervalEstimate
    delta_mue: IntervalEstimate
    uncertainty_bar: float = None
    B: int = 0

    @property
    def deltas(self):
        return self.curve.values

    @property
    def ecdf(self):
        return self.curve.ecdf

    @property
    def band_lo(self):
        return self.curve.band_lo

    @property
    def band_hi(self):
        return self.curve.band_hi
