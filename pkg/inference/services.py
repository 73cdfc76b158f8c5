import logging
from itertools import combinations

import numpy as np
from django.conf import settings
from scipy import stats

from core.exceptions import DegenerateUncertainty, InvalidInput
from estimators.models import Statistic
from estimators.services import evaluate
from sip.services import msip_scores
from .bootstrap import resample_indices, resampled_errors, statistic_replicates
from .models import (
    MIN_REPLICATES,
    MSIP_SCORE,
    PairComparison,
    RankMatrix,
    RankOrientation,
    RankSummary,
)

logger = logging.getLogger(__name__)

RANK_INTERVAL_LEVEL = 0.90


def warn_small_n(kind, n):
    """Warns when N is below the size needed for a calibrated comparison of ``kind``."""
    if kind == MSIP_SCORE:
        return
    if kind.kind == Statistic.MUE and n < settings.ERRSTAT_MIN_N_MUE:
        logger.warning(f"N={n} is small for comparing MUE values (N >= {settings.ERRSTAT_MIN_N_MUE} advised)")
    elif kind.is_quantile and n < settings.ERRSTAT_MIN_N_QUANTILE:
        logger.warning(
            f"N={n} is small for comparing {kind.label} values (N >= {settings.ERRSTAT_MIN_N_QUANTILE} advised)"
        )


def bootstrap_se(E, kind, plan):
    """Bootstrap standard error of ``kind`` on E (SD of the B replicate values)."""
    E = np.asarray(E, dtype=float)
    if E.ndim != 1 or E.size < 2:
        raise InvalidInput("bootstrap_se needs a vector of at least 2 errors")
    replicates = statistic_replicates(E[:, None], kind, resample_indices(plan, E.size))[:, 0]
    return float(np.std(replicates, ddof=1))


def diff_sample(Ei, Ej, kind, plan, workers=None):
    """d_b = S(E_i*) - S(E_j*) over B paired resamples."""
    Ei = np.asarray(Ei, dtype=float)
    Ej = np.asarray(Ej, dtype=float)
    if Ei.ndim != 1 or Ei.shape != Ej.shape:
        raise InvalidInput(f"paired error sets must have equal lengths, got {Ei.shape} and {Ej.shape}")
    replicates = statistic_replicates(np.column_stack([Ei, Ej]), kind, resample_indices(plan, Ei.size, workers))
    return replicates[:, 0] - replicates[:, 1]


def p_t_value(s1, s2, u_diff):
    """xi = |s1 - s2| / u(s1 - s2) and p_t = 2 (1 - Phi(xi))."""
    if not np.isfinite(u_diff) or u_diff <= 0:
        raise DegenerateUncertainty(f"degenerate uncertainty: u(s1 - s2) = {u_diff}")
    xi = abs(s1 - s2) / u_diff
    return float(xi), float(2.0 * stats.norm.sf(xi))


def p_unc_value(s1, s2, u1, u2):
    """Same as p_t_value with u(s1 - s2) replaced by sqrt(u1^2 + u2^2), i.e. ignoring correlation."""
    if u1 < 0 or u2 < 0:
        raise DegenerateUncertainty("degenerate uncertainty: negative statistic uncertainty")
    combined = float(np.hypot(u1, u2))
    if combined == 0:
        raise DegenerateUncertainty("degenerate uncertainty: both statistic uncertainties are zero")
    return p_t_value(s1, s2, combined)


def generalized_p(d):
    """p_g = 2 min(p*, 1 - p*), p* = (#{d < 0} + 0.5 #{d == 0}) / B."""
    d = np.asarray(d, dtype=float)
    if d.size < MIN_REPLICATES:
        raise InvalidInput(f"a generalized p-value needs at least {MIN_REPLICATES} replicates, got {d.size}")
    p_star = (np.sum(d < 0) + 0.5 * np.sum(d == 0)) / d.size
    return float(2.0 * min(p_star, 1.0 - p_star))


def p_inv(d, s1, s2):
    """
    Share of replicates whose difference has the sign opposite to s1 - s2
    (null differences excluded). Reported as 0.5 when s1 == s2.
    """
    d = np.asarray(d, dtype=float)
    observed = np.sign(s1 - s2)
    if observed == 0:
        return 0.5
    signs = np.sign(d)
    opposite = np.sum(signs != observed) - np.sum(d == 0)
    return float(opposite / d.size)


def _safe_p(s1, s2, compute):
    try:
        return compute()
    except DegenerateUncertainty:
        if s1 == s2:
            return 0.0, 1.0
        logger.warning("Null bootstrap uncertainty with distinct statistic values; xi and p left undefined")
        return None, None


def compare_pair(M, i, j, kind, plan, kappa=None):
    """
    Compares statistic ``kind`` between methods i and j of M. A single
    paired bootstrap run provides u1, u2, u(s1 - s2), p_g and P_inv.
    """
    i, j = M.index_of(i), M.index_of(j)
    if i == j:
        raise InvalidInput("a comparison needs two different methods")
    kappa = settings.ERRSTAT_KAPPA if kappa is None else kappa
    warn_small_n(kind, M.n_systems)

    # 1. One shared set of paired resamples: both methods see the same rows.
    errors = M.errors[:, [i, j]]
    replicates = statistic_replicates(errors, kind, resample_indices(plan, M.n_systems))
    # 2. Point values come from the original sample, spreads from the replicates.
    s1, s2 = (float(v) for v in evaluate(kind, errors.T))
    d = replicates[:, 0] - replicates[:, 1]
    u1, u2 = (float(v) for v in np.std(replicates, axis=0, ddof=1))
    u_diff = float(np.std(d, ddof=1))

    # 3. Analytical p-values. A null spread is only harmless when s1 == s2.
    xi, p_t = _safe_p(s1, s2, lambda: p_t_value(s1, s2, u_diff))
    xi_unc, p_unc = _safe_p(s1, s2, lambda: p_unc_value(s1, s2, u1, u2))
    degenerate = s1 == s2
    if degenerate:
        logger.info(f"Degenerate comparison: {M.method_names[i]} and {M.method_names[j]} share {kind.label}={s1:g}")
    # 4. Percentile interval of d; p_g and P_inv below follow from its signs.
    diff_lo, diff_hi = np.percentile(d, [2.5, 97.5])

    return PairComparison(
        method_1=M.method_names[i],
        method_2=M.method_names[j],
        stat=kind.label,
        n_systems=M.n_systems,
        B=plan.B,
        s1=s1,
        s2=s2,
        u1=u1,
        u2=u2,
        u_diff=u_diff,
        xi=xi,
        p_t=p_t,
        xi_unc=xi_unc,
        p_unc=p_unc,
        p_g=generalized_p(d),
        p_inv=p_inv(d, s1, s2),
        n_zero_diffs=int(np.sum(d == 0)),
        diff_lo=float(diff_lo),
        diff_hi=float(diff_hi),
        kappa=float(kappa),
        degenerate=degenerate,
    )


def compare_all(M, kind, plan, kappa=None):
    """compare_pair over every unordered pair of methods, in column order."""
    return [compare_pair(M, i, j, kind, plan, kappa=kappa) for i, j in combinations(range(M.n_methods), 2)]


def _scores(M, kind, indices):
    if kind == MSIP_SCORE:
        resampled = np.moveaxis(np.abs(resampled_errors(M.errors, indices)), 0, -1)
        return msip_scores(resampled), msip_scores(np.abs(M.errors))
    return statistic_replicates(M.errors, kind, indices), np.asarray(evaluate(kind, M.errors.T))


def _ranks(scores, orientation):
    """0-based ranks per row; equal scores go to the lowest method index first."""
    keys = scores if orientation == RankOrientation.LOWER_IS_RANK1 else -scores
    order = np.argsort(keys, axis=-1, kind='stable')
    ranks = np.empty_like(order)
    np.put_along_axis(ranks, order, np.broadcast_to(np.arange(scores.shape[-1]), order.shape), axis=-1)
    return ranks


def rank_summary(p, labels=None, level=RANK_INTERVAL_LEVEL):
    """
    Per method: modal rank (lowest on ties), its probability and the
    shortest contiguous rank window holding at least ``level`` of the mass.
    Ranks are 1-based.
    """
    p = np.asarray(p, dtype=float)
    k = p.shape[1]
    labels = labels or tuple(f"M{j + 1}" for j in range(p.shape[0]))
    summary = []
    for label, row in zip(labels, p):
        mode = int(np.argmax(row))
        window = None
        for width in range(1, k + 1):
            masses = np.array([row[start:start + width].sum() for start in range(k - width + 1)])
            if masses.max() >= level - 1e-12:
                start = int(np.argmax(masses))
                window = (start + 1, start + width)
                break
        summary.append(RankSummary(
            method=label,
            mode=mode + 1,
            probability=float(row[mode]),
            interval_lo=window[0],
            interval_hi=window[1],
        ))
    return tuple(summary)


def rank_probability_matrix(M, kind, plan, orientation=None):
    """
    Ranking probability matrix: for each paired replicate every method is
    scored on the same resampled rows and ranked; P[j, k] counts how often
    method j lands on rank k+1.
    """
    k = M.n_methods
    if k < 2:
        raise InvalidInput("ranking needs at least 2 methods")
    if orientation is None:
        orientation = RankOrientation.HIGHER_IS_RANK1 if kind == MSIP_SCORE else RankOrientation.LOWER_IS_RANK1
    orientation = RankOrientation(orientation)
    warn_small_n(kind, M.n_systems)

    # 1. Score every method on each replicate. MSIP needs the whole matrix per replicate.
    indices = resample_indices(plan, M.n_systems)
    replicate_scores, scores = _scores(M, kind, indices)
    # 2. Rank within each replicate; equal scores go to the lower column index.
    ranks = _ranks(replicate_scores, orientation)

    # 3. Tally (method, rank) pairs. Each row and each column of P sums to 1.
    counts = np.zeros((k, k))
    np.add.at(counts, (np.broadcast_to(np.arange(k), ranks.shape), ranks), 1.0)
    p = counts / plan.B
    return RankMatrix(
        p=p,
        labels=M.method_names,
        stat='MSIP' if kind == MSIP_SCORE else kind.label,
        orientation=orientation,
        reference_ranks=tuple(int(r) + 1 for r in _ranks(scores, orientation)),
        summary=rank_summary(p, labels=M.method_names),
        B=plan.B,
    )
