"""
Monte Carlo studies that check the inference machinery on synthetic data.

Every repetition draws from its own Philox substream keyed by the study
seed and the (cell, repetition) position, so results do not depend on how
repetitions are spread over worker threads.
"""
import logging
from concurrent.futures import ThreadPoolExecutor
from itertools import product

import numpy as np
from django.conf import settings
from scipy import stats

from core.exceptions import InvalidInput
from correlation.services import pearson
from datasets.models import BenchmarkTable
from estimators.models import QuantileMethod, StatKind, Statistic
from estimators.services import evaluate, quantile
from inference.bootstrap import derived_seed, resample_indices, substream
from inference.models import BootstrapPlan
from inference.services import diff_sample, generalized_p, p_t_value
from .generators import correlated_pairs, folded_normal_quantile
from .models import (
    REFERENCE_SET_1,
    REFERENCE_SET_2,
    CorrTransferRow,
    PValueRow,
    PValueSummary,
    QuantileStudyMode,
    QuantileStudyRow,
    Type1Row,
)

logger = logging.getLogger(__name__)

SIGNIFICANCE = 0.05
TYPE1_SAFETY_LIMIT = 0.075
SUMMARY_LEVELS = (0.05, 0.25, 0.5, 0.75, 0.95)
BOOTSTRAP_POOL_SIZE = 500
INTERVAL_Z = float(stats.norm.ppf(0.975))


def _map_repetitions(fn, count):
    """fn(r) for r in range(count), spread over the configured worker threads, in order."""
    workers = max(1, int(settings.ERRSTAT_WORKERS))
    if workers == 1:
        return [fn(r) for r in range(count)]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, range(count)))


def _fisher_interval(r, m):
    """95 % sampling interval of a correlation over m repetitions (Fisher z)."""
    with np.errstate(divide='ignore'):
        z = np.arctanh(r)
    half = INTERVAL_Z / np.sqrt(m - 3)
    return float(np.tanh(z - half)), float(np.tanh(z + half))


def _transfer_kinds(config):
    return (
        StatKind(Statistic.MSE),
        StatKind(Statistic.MUE),
        StatKind(Statistic.Q, q=config.quantile_level, quantile_method=QuantileMethod.HD),
    )


def corr_transfer_study(config):
    """
    Correlation between the statistics of two correlated error sets: for
    each scenario, size and rho, M pairs are drawn and cor(s1, s2) is
    taken across the repetitions.
    """
    rows = []
    cells = product(config.scenarios, config.n_values, config.rho_values)
    for cell, (scenario, n, rho) in enumerate(cells):
        rng = substream(config.seed, (cell,))
        E1, E2 = correlated_pairs(rho, scenario.margin1, scenario.margin2, (config.M, n), rng)
        for kind in _transfer_kinds(config):
            cor = pearson(evaluate(kind, E1), evaluate(kind, E2))
            lo, hi = _fisher_interval(cor, config.M)
            rows.append(CorrTransferRow(
                scenario=scenario.name,
                n=n,
                rho=rho,
                statistic=kind.label,
                cor=cor,
                lo=lo,
                hi=hi,
            ))
        logger.info(f"Correlation transfer: {scenario.name} N={n} rho={rho:g} done")
    return rows


def _type1_stats(config):
    kinds = tuple(config.stats)
    for kind in kinds:
        if kind.kind not in (Statistic.MUE, Statistic.Q):
            raise InvalidInput(f"the type-I study covers MUE and quantiles only, got {kind.label}")
    return kinds


def type1_study(config):
    """
    Rejection rate of p_g < 0.05 when both error sets share one distribution.
    Each cell reports alpha = rejections / M with its binomial standard error.
    """
    kinds = _type1_stats(config)
    for scenario in config.scenarios:
        if scenario.margin1 != scenario.margin2:
            raise InvalidInput(f"scenario '{scenario.name}' draws the two sets from different laws")

    rows = []
    cells = product(kinds, config.scenarios, config.n_values, config.rho_values)
    for cell, (kind, scenario, n, rho) in enumerate(cells):

        def rejected(r, cell=cell, kind=kind, scenario=scenario, n=n, rho=rho):
            rng = substream(config.seed, (cell, r))
            E1, E2 = correlated_pairs(rho, scenario.margin1, scenario.margin2, n, rng)
            plan = BootstrapPlan(B=config.B, seed=derived_seed(config.seed, cell, r))
            return generalized_p(diff_sample(E1, E2, kind, plan, workers=1)) < SIGNIFICANCE

        rejections = int(sum(_map_repetitions(rejected, config.M)))
        alpha = rejections / config.M
        se = float(np.sqrt(alpha * (1.0 - alpha) / config.M))
        if alpha > TYPE1_SAFETY_LIMIT:
            logger.info(f"{kind.label} {scenario.name} N={n} rho={rho:g}: alpha={alpha:.3f} above {TYPE1_SAFETY_LIMIT}")
        rows.append(Type1Row(
            statistic=kind.label,
            scenario=scenario.name,
            n=n,
            rho=rho,
            M=config.M,
            rejections=rejections,
            alpha=alpha,
            se=se,
        ))
        logger.info(f"Type-I study: {kind.label} {scenario.name} N={n} rho={rho:g} alpha={alpha:.4f}")
    return rows


def _summarize(mode, n, method, estimates, reference):
    q05, q25, q50, q75, q95 = (float(v) for v in np.quantile(estimates, SUMMARY_LEVELS))
    return QuantileStudyRow(
        mode=mode,
        n=n,
        estimator=method.value,
        q05=q05,
        q25=q25,
        q50=q50,
        q75=q75,
        q95=q95,
        n_distinct=int(np.unique(estimates).size),
        reference=reference,
    )


def hd_convergence_study(config, modes=None):
    """
    Sampling distributions of the HD and type 7 estimates of the quantile of
    |E| for E ~ N(0.1, 1), summarized by five quantiles per size N.

    Monte Carlo mode draws a fresh sample per repetition. Bootstrap mode
    resamples the first N points of one fixed sample of 500.
    """
    modes = tuple(QuantileStudyMode(m) for m in (modes or QuantileStudyMode.values))
    mu, sigma = REFERENCE_SET_2.mu, REFERENCE_SET_2.sigma
    level = config.quantile_level
    reference = folded_normal_quantile(mu, sigma, level)
    rows = []

    if QuantileStudyMode.MONTE_CARLO in modes:
        for cell, n in enumerate(config.n_values):
            rng = substream(config.seed, (0, cell))
            samples = np.abs(mu + sigma * rng.standard_normal((config.M, n)))
            for method in QuantileMethod:
                rows.append(_summarize(QuantileStudyMode.MONTE_CARLO.value, n, method,
                                       quantile(samples, level, method), reference))

    if QuantileStudyMode.BOOTSTRAP in modes:
        if max(config.n_values) > BOOTSTRAP_POOL_SIZE:
            raise InvalidInput(f"bootstrap mode resamples a fixed sample of {BOOTSTRAP_POOL_SIZE} points")
        pool = np.abs(mu + sigma * substream(config.seed, (1,)).standard_normal(BOOTSTRAP_POOL_SIZE))
        for cell, n in enumerate(config.n_values):
            plan = BootstrapPlan(B=config.M, seed=derived_seed(config.seed, 1, cell))
            replicates = pool[:n][resample_indices(plan, n)]
            for method in QuantileMethod:
                rows.append(_summarize(QuantileStudyMode.BOOTSTRAP.value, n, method,
                                       quantile(replicates, level, method), reference))
    return rows


def _mean_p_t(E1, E2):
    """Normal-theory p-value for equal means of paired sets, u from the paired differences."""
    d = E1 - E2
    u_diff = d.std(ddof=1) / np.sqrt(d.size)
    _, p = p_t_value(E1.mean(), E2.mean(), u_diff)
    return p


def pvalue_study(config):
    """
    p_g against the analytical p_t for the comparison of means, and p_g for
    the quantile comparison with HD and type 7 estimates, on pairs drawn
    from the two reference normal laws. One row per repetition.
    """
    mse = StatKind(Statistic.MSE)
    hd = StatKind(Statistic.Q, q=config.quantile_level, quantile_method=QuantileMethod.HD)
    type7 = StatKind(Statistic.Q, q=config.quantile_level, quantile_method=QuantileMethod.TYPE7)
    rows = []
    for cell, (n, rho) in enumerate(product(config.n_values, config.rho_values)):

        def repetition(r, cell=cell, n=n, rho=rho):
            rng = substream(config.seed, (cell, r))
            E1, E2 = correlated_pairs(rho, REFERENCE_SET_1, REFERENCE_SET_2, n, rng)
            plan = BootstrapPlan(B=config.B, seed=derived_seed(config.seed, cell, r))
            return PValueRow(
                n=n,
                repetition=r,
                rho=rho,
                p_t=_mean_p_t(E1, E2),
                p_g_mse=generalized_p(diff_sample(E1, E2, mse, plan, workers=1)),
                p_g_hd=generalized_p(diff_sample(E1, E2, hd, plan, workers=1)),
                p_g_type7=generalized_p(diff_sample(E1, E2, type7, plan, workers=1)),
            )

        rows.extend(_map_repetitions(repetition, config.M))
        logger.info(f"p-value study: N={n} rho={rho:g} done")
    return rows


def summarize_pvalues(rows):
    """Per (N, rho) means of p_t and p_g(MSE), their mean absolute gap and the quantile p_g medians."""
    cells = {}
    for row in rows:
        cells.setdefault((row.n, row.rho), []).append(row)
    summary = []
    for (n, rho), group in cells.items():
        p_t = np.array([row.p_t for row in group])
        p_g = np.array([row.p_g_mse for row in group])
        summary.append(PValueSummary(
            n=n,
            rho=rho,
            repetitions=len(group),
            mean_p_t=float(p_t.mean()),
            mean_p_g_mse=float(p_g.mean()),
            mean_abs_deviation=float(np.abs(p_g - p_t).mean()),
            median_p_g_hd=float(np.median([row.p_g_hd for row in group])),
            median_p_g_type7=float(np.median([row.p_g_type7 for row in group])),
        ))
    return summary


def synthetic_benchmark(scenario, n, rho, seed, names=('M1', 'M2')):
    """
    A BenchmarkTable whose error sets follow ``scenario``: the reference is
    0 and each method predicts -E, so errors_from_table gives back (E1, E2).
    """
    if n < 2:
        raise InvalidInput(f"a benchmark needs at least 2 systems, got {n}")
    E1, E2 = correlated_pairs(rho, scenario.margin1, scenario.margin2, n, substream(seed, (0,)))
    width = len(str(n))
    return BenchmarkTable(
        system_ids=tuple(f"S{i + 1:0{width}d}" for i in range(n)),
        reference=np.zeros(n),
        methods={names[0]: -E1, names[1]: -E2},
    )
