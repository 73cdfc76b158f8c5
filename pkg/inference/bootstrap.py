"""
Paired bootstrap engine.

Replicate j always draws its row indices from a Philox stream keyed by
(seed, j) alone, so any split of the replicates over worker threads gives
the same index matrix bit for bit.
"""
from concurrent.futures import ThreadPoolExecutor

import numpy as np
from django.conf import settings

from estimators.services import evaluate


def substream(seed, index):
    """Independent generator for replicate (or repetition) ``index`` under ``seed``."""
    key = tuple(int(i) for i in np.atleast_1d(index))
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(int(seed), spawn_key=key)))


def derived_seed(seed, *path):
    """A 64-bit seed for a nested plan, determined by ``seed`` and ``path`` only."""
    seq = np.random.SeedSequence(int(seed), spawn_key=tuple(int(p) for p in path))
    return int(seq.generate_state(1, dtype=np.uint64)[0])


def replicate_indices(plan, n_rows, replicate):
    """Row indices of one replicate: n' draws with replacement from range(n_rows)."""
    rng = substream(plan.seed, replicate)
    return rng.integers(0, n_rows, size=plan.resample_size(n_rows))


def _draw_block(plan, n_rows, replicates):
    return np.stack([replicate_indices(plan, n_rows, j) for j in replicates])


def resample_indices(plan, n_rows, workers=None):
    """(B, n') matrix of row indices, one row per replicate."""
    workers = max(1, int(workers or settings.ERRSTAT_WORKERS))
    replicates = np.arange(plan.B)
    if workers == 1:
        return _draw_block(plan, n_rows, replicates)
    blocks = np.array_split(replicates, workers)
    with ThreadPoolExecutor(max_workers=workers) as pool:
        parts = list(pool.map(lambda block: _draw_block(plan, n_rows, block), blocks))
    return np.vstack(parts)


def paired_resample(M, plan, replicate_index):
    """ErrorMatrix of replicate ``replicate_index``; every column uses the same rows."""
    return M.take(replicate_indices(plan, M.n_systems, replicate_index))


def resampled_errors(errors, indices):
    """(K, B, n') stack of resampled columns from an (N, K) error array."""
    errors = np.asarray(errors, dtype=float)
    return errors.T[:, indices]


def statistic_replicates(errors, kind, indices):
    """(B, K) statistic values, one row per paired replicate."""
    return np.asarray(evaluate(kind, resampled_errors(errors, indices))).T
