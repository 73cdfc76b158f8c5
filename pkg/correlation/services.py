
import numpy as np
from scipy import stats

from core.exceptions import InvalidInput, UndefinedCorrelation
from datasets.models import BenchmarkTable, ErrorMatrix
from .models import CorrelationMethod, CorrMatrix


def _paired(x, y):
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.ndim != 1 or x.shape != y.shape:
        raise InvalidInput(f"correlation needs two vectors of equal length, got {x.shape} and {y.shape}")
    if x.size < 3:
        raise InvalidInput(f"correlation needs at least 3 pairs, got {x.size}")
    return x, y


def pearson(x, y):
    """Product-moment correlation; constant inputs are an error, not 0."""
    x, y = _paired(x, y)
    dx = x - x.mean()
    dy = y - y.mean()
    sxx = dx @ dx
    syy = dy @ dy
    if sxx == 0 or syy == 0:
        raise UndefinedCorrelation("undefined correlation: an input has zero variance")
    r = (dx @ dy) / np.sqrt(sxx * syy)
    return float(np.clip(r, -1.0, 1.0))


def spearman(x, y):
    """Pearson correlation of midranks (ties share the mean of their ranks)."""
    x, y = _paired(x, y)
    return pearson(stats.rankdata(x, method='average'), stats.rankdata(y, method='average'))


def correlation_matrix(data, method=CorrelationMethod.SPEARMAN, labels=None, include_reference=False):
    """
    Pairwise correlations between the columns of ``data``.

    ``data`` is an ErrorMatrix (error sets), a BenchmarkTable (raw values,
    optionally with the reference column first) or an N x K array with
    ``labels``.
    """
    if isinstance(data, ErrorMatrix):
        columns, labels = data.errors, data.method_names
    elif isinstance(data, BenchmarkTable):
        columns, labels = data.values_matrix(include_reference=include_reference)
    else:
        columns = np.asarray(data, dtype=float)
        if labels is None:
            labels = tuple(f"M{j + 1}" for j in range(columns.shape[1]))
    if columns.ndim != 2 or columns.shape[1] < 2:
        raise InvalidInput("a correlation matrix needs at least 2 columns")

    method = CorrelationMethod(method)
    pair = spearman if method == CorrelationMethod.SPEARMAN else pearson
    k = columns.shape[1]
    values = np.eye(k)
    for i in range(k):
        for j in range(i + 1, k):
            try:
                values[i, j] = values[j, i] = pair(columns[:, i], columns[:, j])
            except UndefinedCorrelation:
                raise UndefinedCorrelation(
                    f"undefined correlation between '{labels[i]}' and '{labels[j]}': constant column"
                ) from None
    return CorrMatrix(values=values, labels=labels, method=method)
