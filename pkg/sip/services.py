import numpy as np

from core.exceptions import InvalidInput
from inference.bootstrap import resample_indices
from .models import DeltaEcdfReport, EcdfCurve, IntervalEstimate, SipReport

BAND_LEVELS = (2.5, 97.5)


def _pair(Ei, Ej):
    Ei = np.asarray(Ei, dtype=float)
    Ej = np.asarray(Ej, dtype=float)
    if Ei.ndim != 1 or Ei.shape != Ej.shape:
        raise InvalidInput(f"error sets must be vectors of equal length, got {Ei.shape} and {Ej.shape}")
    if Ei.size == 0:
        raise InvalidInput("empty error sets")
    return Ei, Ej


def abs_error_deltas(Ei, Ej):
    """Delta_k = |e_k(M_i)| - |e_k(M_j)|; negative where M_i does better."""
    Ei, Ej = _pair(Ei, Ej)
    return np.abs(Ei) - np.abs(Ej)


def _gain_stats(deltas):
    """SIP, MG and ML along the last axis; MG/ML are NaN where undefined."""
    n = deltas.shape[-1]
    gains = deltas < 0
    losses = deltas > 0
    n_gain = gains.sum(axis=-1)
    n_loss = losses.sum(axis=-1)
    with np.errstate(invalid='ignore', divide='ignore'):
        mg = np.where(n_gain > 0, np.where(gains, deltas, 0.0).sum(axis=-1) / n_gain, np.nan)
        ml = np.where(n_loss > 0, np.where(losses, deltas, 0.0).sum(axis=-1) / n_loss, np.nan)
    return n_gain / n, mg, ml


def sip_pair(Ei, Ej):
    """(SIP_ij, number of ties): share of systems where M_i has a strictly smaller |e|."""
    deltas = abs_error_deltas(Ei, Ej)
    return float(np.mean(deltas < 0)), int(np.sum(deltas == 0))


def msip_scores(abs_errors):
    """
    MSIP of every method for one or many paired samples.
    ``abs_errors`` has shape (..., N, K); the result (..., K). The row mean
    of the SIP matrix uses the divisor K (diagonal included as 0).
    """
    k = abs_errors.shape[-1]
    scores = np.zeros(abs_errors.shape[:-2] + (k,))
    for i in range(k):
        for j in range(k):
            if i != j:
                scores[..., i] += np.mean(abs_errors[..., i] < abs_errors[..., j], axis=-1)
    return scores / k


def sip_matrix(M):
    """SIP / MG / ML matrices and MSIP for every method pair of an ErrorMatrix."""
    k = M.n_methods
    if k < 2:
        raise InvalidInput("a SIP matrix needs at least 2 methods")
    n = M.n_systems
    sip = np.zeros((k, k))
    mg = np.full((k, k), np.nan)
    ties = np.zeros((k, k), dtype=int)
    for i in range(k):
        for j in range(k):
            if i == j:
                ties[i, j] = n
                continue
            deltas = abs_error_deltas(M.errors[:, i], M.errors[:, j])
            sip[i, j], mg[i, j], _ = (float(v) for v in _gain_stats(deltas))
            ties[i, j] = int(np.sum(deltas == 0))
    ml = -mg.T
    np.fill_diagonal(ml, np.nan)
    msip = msip_scores(np.abs(M.errors))
    order = np.argsort(-msip, kind='stable')
    return SipReport(
        labels=M.method_names,
        n_systems=n,
        sip=sip,
        mg=mg,
        ml=ml,
        msip=msip,
        ties=ties,
        order=order,
    )


def mue_decomposition(Ei, Ej):
    """
    (Delta MUE, SIP_ij * MG_ij + SIP_ji * ML_ij). Undefined MG or ML
    terms contribute 0, so both values agree up to rounding.
    """
    Ei, Ej = _pair(Ei, Ej)
    delta_mue = np.abs(Ei).mean() - np.abs(Ej).mean()
    sip_ij, mg_ij, ml_ij = (float(v) for v in _gain_stats(abs_error_deltas(Ei, Ej)))
    sip_ji = float(np.mean(abs_error_deltas(Ej, Ei) < 0))
    gain = sip_ij * mg_ij if sip_ij > 0 else 0.0
    loss = sip_ji * ml_ij if sip_ji > 0 else 0.0
    return float(delta_mue), gain + loss


def _interval(value, replicates):
    finite = replicates[np.isfinite(replicates)]
    if not np.isfinite(value) or finite.size == 0:
        return IntervalEstimate(value=None if not np.isfinite(value) else float(value), lo=None, hi=None)
    lo, hi = np.percentile(finite, BAND_LEVELS)
    return IntervalEstimate(value=float(value), lo=float(lo), hi=float(hi))


def _ecdf_curve(sample, indices, system_ids):
    """Sorted sample, step ECDF k/N and pointwise percentile band from resampled rows."""
    order = np.argsort(sample, kind='stable')
    values = sample[order]
    n = values.size
    ecdf = np.arange(1, n + 1) / n

    # Each replicate gives its own ECDF, read off at the observed sorted values.
    replicates = np.sort(sample[indices], axis=1)
    n_prime = replicates.shape[1]
    levels = np.empty((replicates.shape[0], n))
    for b, row in enumerate(replicates):
        levels[b] = np.searchsorted(row, values, side='right') / n_prime
    # Pointwise band: percentiles across replicates at every observed value.
    lo, hi = np.percentile(levels, BAND_LEVELS, axis=0)
    # Percentile bands need not bracket the observed step at ties; widen them so they do.
    return EcdfCurve(
        values=values,
        ecdf=ecdf,
        band_lo=np.minimum(lo, ecdf),
        band_hi=np.maximum(hi, ecdf),
        system_ids=tuple(system_ids[i] for i in order),
    )


def delta_ecdf(Ei, Ej, plan, labels=('M1', 'M2'), system_ids=None, uncertainty_bar=None):
    """ECDF of the absolute-error differences between two methods, with bootstrap bands."""
    Ei, Ej = _pair(Ei, Ej)
    n = Ei.size
    if n < 2:
        raise InvalidInput(f"a Delta ECDF needs at least 2 systems, got {n}")
    if system_ids is None:
        system_ids = tuple(str(i + 1) for i in range(n))
    if uncertainty_bar is not None and uncertainty_bar < 0:
        raise InvalidInput("the uncertainty bar must be non-negative")

    deltas = abs_error_deltas(Ei, Ej)
    indices = resample_indices(plan, n)
    resampled = deltas[indices]

    sip, mg, ml = _gain_stats(deltas)
    sip_b, mg_b, ml_b = _gain_stats(resampled)
    delta_mue, _ = mue_decomposition(Ei, Ej)

    return DeltaEcdfReport(
        method_1=labels[0],
        method_2=labels[1],
        curve=_ecdf_curve(deltas, indices, system_ids),
        sip=_interval(float(sip), sip_b),
        mg=_interval(float(mg), mg_b),
        ml=_interval(float(ml), ml_b),
        delta_mue=_interval(delta_mue, resampled.mean(axis=1)),
        uncertainty_bar=uncertainty_bar,
        B=plan.B,
    )


def abs_error_ecdf(E, plan, system_ids=None):
    """ECDF of |e| for one method with its pointwise 95 % bootstrap band."""
    E = np.asarray(E, dtype=float)
    if E.ndim != 1 or E.size < 2:
        raise InvalidInput("an absolute-error ECDF needs a vector of at least 2 errors")
    if system_ids is None:
        system_ids = tuple(str(i + 1) for i in range(E.size))
    return _ecdf_curve(np.abs(E), resample_indices(plan, E.size), system_ids)
