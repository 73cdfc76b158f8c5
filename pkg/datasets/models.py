"""Domain types for benchmark tables and paired error sets.

These are in-memory value objects, not database models: a benchmark is
loaded from CSV, validated once, and then shared read-only between the
analysis services.
"""
from dataclasses import dataclass, field

import numpy as np

from core.exceptions import DatasetError


def _frozen_array(values, dtype=float):
    arr = np.array(values, dtype=dtype, copy=True)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class TableFormat:
    """How a benchmark CSV is laid out on disk."""

    delimiter: str = ','
    comment: str = '#'
    encoding: str = 'utf-8'


@dataclass(frozen=True)
class BenchmarkTable:
    """Reference values and method predictions for N systems.

    ``methods`` and ``calc_uncertainty`` map method names to columns of
    predictions c_i(M) and their uncertainties u(c_i). Methods without an
    uncertainty column are deterministic (u(c_i) = 0).
    """

    system_ids: tuple
    reference: np.ndarray
    methods: dict
    ref_uncertainty: np.ndarray = None
    calc_uncertainty: dict = field(default_factory=dict)

    def __post_init__(self):
        ids = tuple(str(s) for s in self.system_ids)
        object.__setattr__(self, 'system_ids', ids)
        object.__setattr__(self, 'reference', _frozen_array(self.reference))
        object.__setattr__(self, 'methods', {str(k): _frozen_array(v) for k, v in self.methods.items()})
        if self.ref_uncertainty is not None:
            object.__setattr__(self, 'ref_uncertainty', _frozen_array(self.ref_uncertainty))
        object.__setattr__(
            self, 'calc_uncertainty',
            {str(k): _frozen_array(v) for k, v in self.calc_uncertainty.items()},
        )
        self._validate()

    def _validate(self):
        n = len(self.system_ids)
        if n < 2:
            raise DatasetError(f"a benchmark needs at least 2 systems, got {n}")
        if not self.methods:
            raise DatasetError("a benchmark needs at least one method column")

        seen = set()
        for row, sid in enumerate(self.system_ids, start=1):
            if sid in seen:
                raise DatasetError(f"duplicate system id '{sid}'", row=row)
            seen.add(sid)

        columns = {'Ref': self.reference, **self.methods}
        if self.ref_uncertainty is not None:
            columns['uRef'] = self.ref_uncertainty
        for name, values in self.calc_uncertainty.items():
            if name not in self.methods:
                raise DatasetError(f"uncertainty column 'u:{name}' has no method column '{name}'")
            columns[f'u:{name}'] = values

        for name, values in columns.items():
            if values.shape != (n,):
                raise DatasetError(f"column '{name}' has {values.size} values, expected {n}")
            bad = np.flatnonzero(~np.isfinite(values))
            if bad.size:
                raise DatasetError(f"missing or non-numeric cell in column '{name}'", row=int(bad[0]) + 1)
            if name == 'uRef' or name.startswith('u:'):
                negative = np.flatnonzero(values < 0)
                if negative.size:
                    raise DatasetError(f"negative uncertainty in column '{name}'", row=int(negative[0]) + 1)

    @property
    def n_systems(self):
        return len(self.system_ids)

    @property
    def method_names(self):
        return tuple(self.methods)

    @property
    def has_uncertainty(self):
        return self.ref_uncertainty is not None or bool(self.calc_uncertainty)

    def values_matrix(self, include_reference=True):
        """Columns of raw values (reference first when requested) and their labels."""
        labels = list(self.method_names)
        cols = [self.methods[m] for m in labels]
        if include_reference:
            labels.insert(0, 'Ref')
            cols.insert(0, self.reference)
        return np.column_stack(cols), tuple(labels)


@dataclass(frozen=True)
class ErrorMatrix:
    """Paired signed errors e_i(M_j) = r_i - c_i(M_j), one column per method.

    ``error_uncertainty`` holds u(e_i) per cell (N x K) since u(c_i) may
    differ between methods; it is ``None`` when the table carries no
    uncertainty at all.
    """

    errors: np.ndarray
    method_names: tuple
    error_uncertainty: np.ndarray = None
    system_ids: tuple = None

    def __post_init__(self):
        errors = np.asarray(self.errors, dtype=float)
        if errors.ndim == 1:
            errors = errors[:, None]
        if errors.ndim != 2:
            raise DatasetError(f"errors must be a N x K matrix, got {errors.ndim} dimensions")
        errors = _frozen_array(errors)
        object.__setattr__(self, 'errors', errors)
        object.__setattr__(self, 'method_names', tuple(str(m) for m in self.method_names))
        n, k = errors.shape
        if k != len(self.method_names):
            raise DatasetError(f"{k} error columns but {len(self.method_names)} method names")
        if len(set(self.method_names)) != k:
            raise DatasetError("method names must be unique")
        if self.system_ids is None:
            object.__setattr__(self, 'system_ids', tuple(str(i + 1) for i in range(n)))
        else:
            object.__setattr__(self, 'system_ids', tuple(str(s) for s in self.system_ids))
        if len(self.system_ids) != n:
            raise DatasetError(f"{len(self.system_ids)} system ids for {n} error rows")
        if self.error_uncertainty is not None:
            unc = np.asarray(self.error_uncertainty, dtype=float)
            if unc.ndim == 1:
                unc = np.repeat(unc[:, None], k, axis=1)
            if unc.shape != (n, k):
                raise DatasetError(f"uncertainty shape {unc.shape} does not match errors {errors.shape}")
            if np.any(unc < 0) or not np.all(np.isfinite(unc)):
                raise DatasetError("error uncertainties must be finite and non-negative")
            object.__setattr__(self, 'error_uncertainty', _frozen_array(unc))

    @property
    def n_systems(self):
        return self.errors.shape[0]

    @property
    def n_methods(self):
        return self.errors.shape[1]

    def index_of(self, method):
        if isinstance(method, (int, np.integer)):
            if not 0 <= method < self.n_methods:
                raise DatasetError(f"method index {method} out of range")
            return int(method)
        try:
            return self.method_names.index(method)
        except ValueError:
            raise DatasetError(f"unknown method '{method}'; known: {', '.join(self.method_names)}") from None

    def column(self, method):
        return self.errors[:, self.index_of(method)]

    def uncertainty_of(self, method):
        if self.error_uncertainty is None:
            return None
        return self.error_uncertainty[:, self.index_of(method)]

    def take(self, rows):
        """Rows ``rows`` of every column, pairing preserved."""
        rows = np.asarray(rows, dtype=np.intp)
        unc = None if self.error_uncertainty is None else self.error_uncertainty[rows]
        return ErrorMatrix(
            errors=self.errors[rows],
            method_names=self.method_names,
            error_uncertainty=unc,
            system_ids=tuple(self.system_ids[i] for i in rows),
        )

    def select(self, methods):
        """Sub-matrix restricted to ``methods`` (names or indices), in that order."""
        idx = [self.index_of(m) for m in methods]
        unc = None if self.error_uncertainty is None else self.error_uncertainty[:, idx]
        return ErrorMatrix(
            errors=self.errors[:, idx],
            method_names=tuple(self.method_names[i] for i in idx),
            error_uncertainty=unc,
            system_ids=self.system_ids,
        )
