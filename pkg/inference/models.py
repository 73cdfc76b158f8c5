from dataclasses import dataclass

import numpy as np
from django.db import models

from core.exceptions import InvalidInput

MIN_REPLICATES = 100
MAX_SEED = 2 ** 64 - 1

# Ranking score that is not a StatKind: the mean SIP of each method.
MSIP_SCORE = 'msip'


class RankOrientation(models.TextChoices):
    LOWER_IS_RANK1 = 'lower', 'Lowest score ranks first'
    HIGHER_IS_RANK1 = 'higher', 'Highest score ranks first'


@dataclass(frozen=True)
class BootstrapPlan:
    """Replicate count, RNG seed and optional N'-out-of-N resample size."""

    B: int = 1000
    seed: int = 0
    n_prime: int = None

    def __post_init__(self):
        if int(self.B) < MIN_REPLICATES:
            raise InvalidInput(f"at least {MIN_REPLICATES} bootstrap replicates are required, got {self.B}")
        if not 0 <= int(self.seed) <= MAX_SEED:
            raise InvalidInput(f"seed must be a non-negative 64-bit integer, got {self.seed}")
        if self.n_prime is not None and int(self.n_prime) < 2:
            raise InvalidInput(f"n_prime must be at least 2, got {self.n_prime}")
        object.__setattr__(self, 'B', int(self.B))
        object.__setattr__(self, 'seed', int(self.seed))

    def resample_size(self, n_rows):
        if self.n_prime is None:
            return n_rows
        if self.n_prime > n_rows:
            raise InvalidInput(f"n_prime={self.n_prime} exceeds the number of systems N={n_rows}")
        return int(self.n_prime)


@dataclass(frozen=True)
class PairComparison:
    """Bootstrap comparison of one statistic between two paired error sets.

    p-values that cannot be formed (null uncertainty with distinct values)
    are ``None``; ``degenerate`` is set when s1 == s2, in which case
    ``p_inv`` is reported as 0.5.
    """

    method_1: str
    method_2: str
    stat: str
    n_systems: int
    B: int
    s1: float
    s2: float
    u1: float
    u2: float
    u_diff: float
    xi: float
    p_t: float
    xi_unc: float
    p_unc: float
    p_g: float
    p_inv: float
    n_zero_diffs: int
    diff_lo: float
    diff_hi: float
    kappa: float
    degenerate: bool

    @property
    def significant(self):
        return self.xi is not None and self.xi > self.kappa


@dataclass(frozen=True)
class RankSummary:
    method: str
    mode: int
    probability: float
    interval_lo: int
    interval_hi: int


@dataclass(frozen=True)
class RankMatrix:
    """P[j, k] = probability that method j takes rank k+1 under paired bootstrap."""

    p: np.ndarray
    labels: tuple
    stat: str
    orientation: RankOrientation
    reference_ranks: tuple
    summary: tuple
    B: int

    def __post_init__(self):
        p = np.array(self.p, dtype=float, copy=True)
        p.setflags(write=False)
        object.__setattr__(self, 'p', p)
        object.__setattr__(self, 'orientation', RankOrientation(self.orientation))
