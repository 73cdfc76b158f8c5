"""Random error sets for the validation studies."""
from functools import lru_cache

import numpy as np
from scipy import optimize, stats

from core.exceptions import InvalidInput
from .models import GHParams, StudentTParams

FOLDED_QUANTILE_XTOL = 1e-8


def gh_transform(z, g, h):
    """
    g-and-h transform of standard normal deviates:
    (exp(g z) - 1) / g * exp(h z^2 / 2) for g > 0, z * exp(h z^2 / 2) for g = 0.
    """
    if g < 0 or h < 0:
        raise InvalidInput(f"g and h must be non-negative, got g={g}, h={h}")
    z = np.asarray(z, dtype=float)
    tail = np.exp(0.5 * h * z ** 2)
    if g > 0:
        out = np.expm1(g * z) / g * tail
    else:
        out = z * tail
    return float(out) if out.ndim == 0 else out


@lru_cache(maxsize=64)
def gh_moments(g, h):
    """
    Mean and standard deviation of a g-and-h variable, in closed form from
    E[exp(a z + b z^2 / 2)] = exp(a^2 / (2 (1 - b))) / sqrt(1 - b) for b < 1.
    """
    if g < 0 or h < 0:
        raise InvalidInput(f"g and h must be non-negative, got g={g}, h={h}")
    if h >= 0.5:
        raise InvalidInput(f"the g-and-h variance is infinite for h >= 1/2, got h={h}")
    if g == 0:
        return 0.0, float((1.0 - 2.0 * h) ** -0.75)

    mean = np.expm1(g ** 2 / (2.0 * (1.0 - h))) / (g * np.sqrt(1.0 - h))
    second = (
        np.exp(2.0 * g ** 2 / (1.0 - 2.0 * h))
        - 2.0 * np.exp(g ** 2 / (2.0 * (1.0 - 2.0 * h)))
        + 1.0
    ) / (g ** 2 * np.sqrt(1.0 - 2.0 * h))
    return float(mean), float(np.sqrt(second - mean ** 2))


def correlated_normals(rho, size, rng):
    """Two standard normal arrays with correlation ``rho``."""
    if not -1.0 <= rho <= 1.0:
        raise InvalidInput(f"correlation must lie in [-1, 1], got {rho}")
    z1 = rng.standard_normal(size)
    z2 = rho * z1 + np.sqrt(1.0 - rho ** 2) * rng.standard_normal(size)
    return z1, z2


def margin_from_normal(z, margin):
    """Maps standard normal deviates onto ``margin``, standardized to its mu and sigma."""
    if isinstance(margin, StudentTParams):
        x = stats.t.ppf(stats.norm.cdf(z), margin.df)
        scale = np.sqrt(margin.df / (margin.df - 2.0))
        return margin.mu + margin.sigma * x / scale
    if isinstance(margin, GHParams):
        mean, sd = gh_moments(margin.g, margin.h)
        return margin.mu + margin.sigma * (gh_transform(z, margin.g, margin.h) - mean) / sd
    raise InvalidInput(f"unsupported margin {margin!r}")


def correlated_pairs(rho, params1, params2, N, rng):
    """
    Paired error sets (E1, E2) of size N (an int or a shape). The
    correlation ``rho`` is imposed on the underlying Gaussian pair, each
    margin is then transformed and standardized.
    """
    z1, z2 = correlated_normals(rho, N, rng)
    return margin_from_normal(z1, params1), margin_from_normal(z2, params2)


def folded_normal_quantile(mu, sigma, level=0.95):
    """Quantile of |X| for X ~ N(mu, sigma^2), by bisection on the folded CDF."""
    if sigma <= 0:
        raise InvalidInput(f"sigma must be positive, got {sigma}")
    if not 0.0 < level < 1.0:
        raise InvalidInput(f"quantile level must lie strictly inside (0, 1), got {level}")

    def excess(x):
        return stats.norm.cdf((x - mu) / sigma) - stats.norm.cdf((-x - mu) / sigma) - level

    return float(optimize.bisect(excess, 0.0, abs(mu) + 10.0 * sigma, xtol=FOLDED_QUANTILE_XTOL))


def population_folded_stats(mu, sigma):
    """(MSE, RMSD, MUE, Q95) of errors distributed as N(mu, sigma^2)."""
    if sigma <= 0:
        raise InvalidInput(f"sigma must be positive, got {sigma}")
    mue = sigma * np.sqrt(2.0 / np.pi) * np.exp(-mu ** 2 / (2.0 * sigma ** 2)) \
        + mu * (1.0 - 2.0 * stats.norm.cdf(-mu / sigma))
    return float(mu), float(sigma), float(mue), folded_normal_quantile(mu, sigma, 0.95)
