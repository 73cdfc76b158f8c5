import io
import logging

import numpy as np
import pandas as pd
from django.conf import settings

from core.exceptions import DatasetError, InvalidInput
from .models import BenchmarkTable, ErrorMatrix, TableFormat

logger = logging.getLogger(__name__)

SYSTEM_COLUMN = 'System'
REFERENCE_COLUMN = 'Ref'
REFERENCE_UNCERTAINTY_COLUMN = 'uRef'
METHOD_UNCERTAINTY_PREFIX = 'u:'


def _parse_header(header):
    """
    Splits the header row into its roles.
    Returns (uRef position or None, [(method, position)], {method: position}).
    """
    names = [str(h).strip().lstrip('\ufeff') if isinstance(h, str) else '' for h in header]
    if len(names) < 3:
        raise DatasetError(
            f"malformed header: expected '{SYSTEM_COLUMN},{REFERENCE_COLUMN},<Method>...', got {','.join(names)}"
        )
    if names[0] != SYSTEM_COLUMN or names[1] != REFERENCE_COLUMN:
        raise DatasetError(
            f"malformed header: first columns must be '{SYSTEM_COLUMN},{REFERENCE_COLUMN}', got '{names[0]},{names[1]}'"
        )
    if any(not n for n in names):
        raise DatasetError("malformed header: empty column name")
    dupes = sorted({n for n in names if names.count(n) > 1})
    if dupes:
        raise DatasetError(f"malformed header: duplicate column(s) {', '.join(dupes)}")

    ref_unc = None
    methods = []
    method_unc = {}
    for pos, name in enumerate(names[2:], start=2):
        if name == REFERENCE_UNCERTAINTY_COLUMN:
            ref_unc = pos
        elif name.startswith(METHOD_UNCERTAINTY_PREFIX):
            target = name[len(METHOD_UNCERTAINTY_PREFIX):]
            if not target:
                raise DatasetError(f"malformed header: '{name}' names no method")
            method_unc[target] = pos
        else:
            methods.append((name, pos))

    if not methods:
        raise DatasetError("malformed header: no method column")
    known = {m for m, _ in methods}
    for target in method_unc:
        if target not in known:
            raise DatasetError(f"malformed header: uncertainty column 'u:{target}' has no method column")
    return ref_unc, methods, method_unc


def _uncommented_text(source, fmt):
    """
    Decoded table text without its comment lines. Only lines whose first
    non-blank character opens a comment are dropped; a comment character
    inside a cell is data.
    """
    if hasattr(source, 'read'):
        content = source.read()
    else:
        with open(source, 'rb') as fh:
            content = fh.read()
    if isinstance(content, bytes):
        content = content.decode(fmt.encoding)
    lines = content.splitlines()
    if fmt.comment:
        lines = [line for line in lines if not line.lstrip().startswith(fmt.comment)]
    return '\n'.join(lines) + '\n'


def load_table(source, fmt=None, strict=True):
    """
    Reads a benchmark CSV (path, binary or text stream) into a validated BenchmarkTable.

    With ``strict`` a row holding a missing or non-numeric cell is an error
    naming the row; otherwise such rows are dropped with a warning.
    """
    fmt = fmt or TableFormat()
    try:
        text = _uncommented_text(source, fmt)
        raw = pd.read_csv(
            io.StringIO(text),
            sep=fmt.delimiter,
            header=None,
            dtype=str,
            keep_default_na=False,
            skip_blank_lines=True,
            skipinitialspace=True,
        )
    except pd.errors.EmptyDataError:
        raise DatasetError("empty table: a header row is mandatory") from None
    except pd.errors.ParserError as e:
        raise DatasetError(f"malformed CSV: {e}") from None
    except UnicodeDecodeError as e:
        raise DatasetError(f"table is not valid {fmt.encoding}: {e}") from None

    ref_unc_pos, method_pos, method_unc_pos = _parse_header(raw.iloc[0].tolist())
    body = raw.iloc[1:].reset_index(drop=True)

    ids = body[0].fillna('').astype(str).str.strip()
    numeric_positions = {REFERENCE_COLUMN: 1}
    if ref_unc_pos is not None:
        numeric_positions[REFERENCE_UNCERTAINTY_COLUMN] = ref_unc_pos
    for name, pos in method_pos:
        numeric_positions[name] = pos
    for name, pos in method_unc_pos.items():
        numeric_positions[f'{METHOD_UNCERTAINTY_PREFIX}{name}'] = pos

    columns = {}
    bad_rows = {}
    for name, pos in numeric_positions.items():
        cells = body[pos] if pos in body.columns else pd.Series([np.nan] * len(body))
        values = pd.to_numeric(cells.str.strip() if cells.dtype == object else cells, errors='coerce')
        values = values.to_numpy(dtype=float)
        columns[name] = values
        for i in np.flatnonzero(~np.isfinite(values)):
            bad_rows.setdefault(int(i) + 1, name)
    for i in np.flatnonzero((ids == '').to_numpy()):
        bad_rows.setdefault(int(i) + 1, SYSTEM_COLUMN)

    if bad_rows:
        if strict:
            row = min(bad_rows)
            raise DatasetError(f"missing or non-numeric cell in column '{bad_rows[row]}'", row=row)
        logger.warning(f"Dropped {len(bad_rows)} incomplete row(s): {sorted(bad_rows)}")

    keep = np.array([i + 1 not in bad_rows for i in range(len(body))], dtype=bool)
    table = BenchmarkTable(
        system_ids=tuple(ids[keep]),
        reference=columns[REFERENCE_COLUMN][keep],
        ref_uncertainty=columns[REFERENCE_UNCERTAINTY_COLUMN][keep] if ref_unc_pos is not None else None,
        methods={name: columns[name][keep] for name, _ in method_pos},
        calc_uncertainty={
            name: columns[f'{METHOD_UNCERTAINTY_PREFIX}{name}'][keep] for name in method_unc_pos
        },
    )
    logger.info(f"Loaded benchmark: N={table.n_systems}, K={len(table.methods)}")
    return table


def combine_uncertainty(u_r, u_c):
    """u(e_i) = sqrt(u(r_i)^2 + u(c_i)^2); works on scalars and arrays."""
    u_r = np.asarray(u_r, dtype=float)
    u_c = np.asarray(u_c, dtype=float)
    if not (np.all(np.isfinite(u_r)) and np.all(np.isfinite(u_c))):
        raise InvalidInput("uncertainties must be finite")
    if np.any(u_r < 0) or np.any(u_c < 0):
        raise InvalidInput("negative uncertainty")
    combined = np.hypot(u_r, u_c)
    return float(combined) if combined.ndim == 0 else combined


def screen_uncertainty(u):
    """
    Warns when the spread of u(e_i) is extreme (max/median above the
    configured ratio). Returns the ratio, or None when every u is zero.
    """
    u = np.asarray(u, dtype=float).ravel()
    if u.size == 0 or not np.any(u > 0):
        return None
    median = float(np.median(u))
    ratio = float('inf') if median == 0 else float(u.max() / median)
    if ratio > settings.ERRSTAT_EXTREME_UNCERTAINTY_RATIO:
        logger.warning(
            f"Extreme uncertainty values: max u(e)/median u(e) = {ratio:.3g} "
            f"(> {settings.ERRSTAT_EXTREME_UNCERTAINTY_RATIO:g}); consider curating the dataset"
        )
    return ratio


def errors_from_table(table):
    """Builds the paired error matrix e_i(M) = r_i - c_i(M)."""
    names = table.method_names
    predictions = np.column_stack([table.methods[m] for m in names])
    errors = table.reference[:, None] - predictions

    uncertainty = None
    if table.has_uncertainty:
        zeros = np.zeros(table.n_systems)
        u_r = table.ref_uncertainty if table.ref_uncertainty is not None else zeros
        uncertainty = np.column_stack(
            [combine_uncertainty(u_r, table.calc_uncertainty.get(m, zeros)) for m in names]
        )
        screen_uncertainty(uncertainty)

    return ErrorMatrix(
        errors=errors,
        method_names=names,
        error_uncertainty=uncertainty,
        system_ids=table.system_ids,
    )
