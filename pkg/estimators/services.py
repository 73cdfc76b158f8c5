import logging
from functools import lru_cache

import numpy as np
from scipy import special, stats

from core.exceptions import InvalidInput
from .models import QuantileMethod, Statistic, WeightedMeanResult

logger = logging.getLogger(__name__)

DEFAULT_TOL = 1e-8
DEFAULT_MAX_ITER = 100


def _scalar(value):
    value = np.asarray(value)
    return float(value) if value.ndim == 0 else value


def _samples(x, minimum=2, axis=-1):
    arr = np.asarray(x, dtype=float)
    if arr.ndim == 0 or arr.shape[axis] == 0:
        raise InvalidInput("empty input")
    if arr.shape[axis] < minimum:
        raise InvalidInput(f"at least {minimum} values are required, got {arr.shape[axis]}")
    return arr


def _uncertainties(u, n, strictly_positive=True):
    u = np.asarray(u, dtype=float)
    if u.shape != (n,):
        raise InvalidInput(f"expected {n} uncertainties, got shape {u.shape}")
    if not np.all(np.isfinite(u)):
        raise InvalidInput("uncertainties must be finite")
    if strictly_positive and np.any(u <= 0):
        raise InvalidInput("weighted statistics need strictly positive uncertainties")
    if np.any(u < 0):
        raise InvalidInput("negative uncertainty")
    return u


@lru_cache(maxsize=512)
def hd_weights(n, q):
    """
    Harrell-Davis weights for n order statistics at level q:
    w_i = I(i/n; a, b) - I((i-1)/n; a, b), a = (n+1)q, b = (n+1)(1-q).
    """
    a = (n + 1) * q
    b = (n + 1) * (1.0 - q)
    cdf = special.betainc(a, b, np.arange(n + 1) / n)
    weights = np.diff(cdf)
    weights.setflags(write=False)
    return weights


def quantile_hd(x, q, axis=-1):
    """Harrell-Davis estimate of the q-quantile along ``axis``."""
    if not 0.0 < q < 1.0:
        raise InvalidInput(f"quantile level must lie strictly inside (0, 1), got {q}")
    x = _samples(x, axis=axis)
    ordered = np.moveaxis(np.sort(x, axis=axis), axis, -1)
    return _scalar(ordered @ hd_weights(ordered.shape[-1], float(q)))


def quantile_type7(x, q, axis=-1):
    """Hyndman-Fan type 7 quantile (linear interpolation of order statistics)."""
    if not 0.0 <= q <= 1.0:
        raise InvalidInput(f"quantile level must lie inside [0, 1], got {q}")
    x = _samples(x, axis=axis)
    return _scalar(np.quantile(x, q, axis=axis, method='linear'))


def quantile(x, q, method=QuantileMethod.HD, axis=-1):
    if QuantileMethod(method) == QuantileMethod.HD:
        return quantile_hd(x, q, axis=axis)
    return quantile_type7(x, q, axis=axis)


def evaluate(kind, E):
    """
    Value of statistic ``kind`` for error set E.

    E may carry leading batch dimensions; the statistic is taken over the
    last axis, so a (B, N) array of bootstrap replicates yields B values.
    RMSD is the sample standard deviation about the mean (N-1 denominator).
    """
    E = _samples(E)
    if kind.kind == Statistic.MSE:
        return _scalar(E.mean(axis=-1))
    if kind.kind == Statistic.MUE:
        return _scalar(np.abs(E).mean(axis=-1))
    if kind.kind == Statistic.RMSD:
        return _scalar(E.std(axis=-1, ddof=1))
    return quantile(np.abs(E), kind.q, method=kind.quantile_method)


def mean_standard_error(E, small_n_correction=False):
    """
    u(e_bar) = s_e / sqrt(N), optionally enlarged by sqrt((N-1)/(N-3)) to
    account for the uncertainty on s_e.
    """
    E = _samples(E)
    n = E.shape[-1]
    se = E.std(ddof=1) / np.sqrt(n)
    if small_n_correction:
        if n <= 3:
            raise InvalidInput(f"the small-N correction needs N >= 4, got {n}")
        se *= np.sqrt((n - 1) / (n - 3))
    return float(se)


def chi2_weighted(E, u, mean):
    """
    Weighted chi-squared of E about ``mean`` and whether it lies inside the
    central 95 % interval of a chi-squared law with N-1 degrees of freedom.
    """
    E = _samples(E)
    u = _uncertainties(u, E.size)
    chi2w = float(np.sum(((E - mean) / u) ** 2))
    dof = E.size - 1
    lo, hi = stats.chi2.ppf([0.025, 0.975], dof)
    return chi2w, bool(lo <= chi2w <= hi)


def weighted_mean(E, u):
    """Inverse-variance weighted mean of E with u(e_bar) = (sum u^-2)^-1/2."""
    E = _samples(E)
    u = _uncertainties(u, E.size)
    inv = u ** -2
    weights = inv / inv.sum()
    mean = float(weights @ E)
    chi2w, consistent = chi2_weighted(E, u, mean)
    return WeightedMeanResult(
        mean=mean,
        uncertainty=float(inv.sum() ** -0.5),
        weights=weights,
        sigma2_model=0.0,
        chi2w=chi2w,
        chi2_dof=E.size - 1,
        consistent=consistent,
    )


def cochran_model_variance(E, u, center):
    """Cochran's decomposition var(e) = sigma^2 + mean(u^2), sigma^2 clipped at 0."""
    E = _samples(E)
    u = _uncertainties(u, E.size, strictly_positive=False)
    variance = np.sum((E - center) ** 2) / (E.size - 1)
    return max(0.0, float(variance - np.mean(u ** 2)))


def _cochran_weights(v):
    # Zero-variance points, if any, carry the whole weight.
    if np.any(v <= 0):
        exact = (v <= 0).astype(float)
        return exact / exact.sum(), 0.0
    inv = 1.0 / v
    return inv / inv.sum(), float(inv.sum() ** -0.5)


def cochran_rescale(E, u, max_iter=DEFAULT_MAX_ITER, tol=DEFAULT_TOL):
    """
    Weighted mean with weights (sigma^2 + u_i^2)^-1, sigma^2 being the
    model-error variance from Cochran's ANOVA estimate. sigma^2 and the
    mean depend on each other, so both are iterated until the mean moves
    by less than tol * s_e.
    """
    E = _samples(E, minimum=3)
    u = _uncertainties(u, E.size, strictly_positive=False)
    s_e = float(E.std(ddof=1))

    center = float(E.mean())
    converged = False
    iterations = 0
    for iterations in range(1, max_iter + 1):
        sigma2 = cochran_model_variance(E, u, center)
        weights, uncertainty = _cochran_weights(sigma2 + u ** 2)
        new_center = float(weights @ E)
        step = abs(new_center - center)
        center = new_center
        if step <= tol * s_e:
            converged = True
            break

    if not converged:
        logger.warning(f"Cochran reweighting did not converge after {max_iter} iterations; reporting last iterate")

    v = sigma2 + u ** 2
    if np.all(v > 0):
        chi2w = float(np.sum((E - center) ** 2 / v))
        lo, hi = stats.chi2.ppf([0.025, 0.975], E.size - 1)
        consistent = bool(lo <= chi2w <= hi)
    else:
        chi2w, consistent = 0.0, False

    return WeightedMeanResult(
        mean=center,
        uncertainty=uncertainty,
        weights=weights,
        sigma2_model=sigma2,
        chi2w=chi2w,
        chi2_dof=E.size - 1,
        consistent=consistent,
        converged=converged,
        iterations=iterations,
    )
