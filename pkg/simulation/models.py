from dataclasses import dataclass, field

from django.db import models

from core.exceptions import InvalidInput
from estimators.models import StatKind, Statistic

MIN_REPETITIONS = 100
MIN_SIZE = 10


@dataclass(frozen=True)
class GHParams:
    """g-and-h margin: asymmetry g, tail weight h, then location mu and scale sigma.

    The standardized margin has mean ``mu`` and standard deviation ``sigma``;
    (g, h) = (0, 0) is the normal law.
    """

    g: float = 0.0
    h: float = 0.0
    mu: float = 0.0
    sigma: float = 1.0

    def __post_init__(self):
        if self.g < 0 or self.h < 0:
            raise InvalidInput(f"g and h must be non-negative, got g={self.g}, h={self.h}")
        if self.sigma <= 0:
            raise InvalidInput(f"sigma must be positive, got {self.sigma}")

    @property
    def label(self):
        return f"gh(g={self.g:g},h={self.h:g})"


@dataclass(frozen=True)
class StudentTParams:
    """Student-t margin with ``df`` degrees of freedom, rescaled to mean mu, SD sigma."""

    df: float = 5.0
    mu: float = 0.0
    sigma: float = 1.0

    def __post_init__(self):
        if self.df <= 2:
            raise InvalidInput(f"a Student-t margin needs df > 2 for a finite variance, got {self.df}")
        if self.sigma <= 0:
            raise InvalidInput(f"sigma must be positive, got {self.sigma}")

    @property
    def label(self):
        return f"t(df={self.df:g})"


@dataclass(frozen=True)
class Scenario:
    """Margins of the two error sets of a simulated pair."""

    name: str
    margin1: object
    margin2: object = None

    def __post_init__(self):
        if self.margin2 is None:
            object.__setattr__(self, 'margin2', self.margin1)


SCENARIOS = {
    'normal': Scenario('normal', GHParams(0.0, 0.0)),
    'heavy': Scenario('heavy', GHParams(0.0, 0.2)),
    'asym': Scenario('asym', GHParams(0.2, 0.0)),
    'heavyasym': Scenario('heavyasym', GHParams(0.2, 0.2)),
    'shifted-normal': Scenario('shifted-normal', GHParams(mu=-0.2), GHParams(mu=0.5)),
    'shifted-t': Scenario('shifted-t', StudentTParams(5.0, mu=-0.2), StudentTParams(5.0, mu=0.5)),
}

GH_SCENARIOS = ('normal', 'heavy', 'asym', 'heavyasym')


class QuantileStudyMode(models.TextChoices):
    MONTE_CARLO = 'montecarlo', 'Fresh samples per repetition'
    BOOTSTRAP = 'bootstrap', 'Bootstrap of one fixed sample'


# Bivariate normal parameters behind the reference values MSE/RMSD/MUE/Q95:
# E1 ~ N(0, 1.1), E2 ~ N(0.1, 1.0).
REFERENCE_SET_1 = GHParams(mu=0.0, sigma=1.1)
REFERENCE_SET_2 = GHParams(mu=0.1, sigma=1.0)


def _default_stats():
    return (StatKind(Statistic.MUE), StatKind(Statistic.Q, q=0.95))


@dataclass(frozen=True)
class StudyConfig:
    """Grid and sampling effort of a simulation study."""

    n_values: tuple = (100,)
    rho_values: tuple = (0.0,)
    M: int = 1000
    B: int = 1000
    scenarios: tuple = (SCENARIOS['normal'],)
    seed: int = 0
    stats: tuple = field(default_factory=_default_stats)
    quantile_level: float = 0.95

    def __post_init__(self):
        object.__setattr__(self, 'n_values', tuple(int(n) for n in self.n_values))
        object.__setattr__(self, 'rho_values', tuple(float(r) for r in self.rho_values))
        object.__setattr__(self, 'scenarios', tuple(self.scenarios))
        object.__setattr__(self, 'stats', tuple(self.stats))
        if self.M < MIN_REPETITIONS:
            raise InvalidInput(f"at least {MIN_REPETITIONS} repetitions are required, got {self.M}")
        if not self.n_values or min(self.n_values) < MIN_SIZE:
            raise InvalidInput(f"dataset sizes must be at least {MIN_SIZE}, got {self.n_values}")
        if not self.rho_values or any(abs(r) > 1 for r in self.rho_values):
            raise InvalidInput(f"correlations must lie in [-1, 1], got {self.rho_values}")
        if not self.scenarios:
            raise InvalidInput("at least one scenario is required")
        if not 0.0 < self.quantile_level < 1.0:
            raise InvalidInput(f"quantile level must lie strictly inside (0, 1), got {self.quantile_level}")


@dataclass(frozen=True)
class CorrTransferRow:
    scenario: str
    n: int
    rho: float
    statistic: str
    cor: float
    lo: float
    hi: float


@dataclass(frozen=True)
class Type1Row:
    statistic: str
    scenario: str
    n: int
    rho: float
    M: int
    rejections: int
    alpha: float
    se: float


@dataclass(frozen=True)
class QuantileStudyRow:
    mode: str
    n: int
    estimator: str
    q05: float
    q25: float
    q50: float
    q75: float
    q95: float
    n_distinct: int
    reference: float


@dataclass(frozen=True)
class PValueRow:
    n: int
    repetition: int
    rho: float
    p_t: float
    p_g_mse: float
    p_g_hd: float
    p_g_type7: float


@dataclass(frozen=True)
class PValueSummary:
    n: int
    rho: float
    repetitions: int
    mean_p_t: float
    mean_p_g_mse: float
    mean_abs_deviation: float
    median_p_g_hd: float
    median_p_g_type7: float
