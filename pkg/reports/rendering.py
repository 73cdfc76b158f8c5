"""
SVG rendering of the report matrices and ECDF curves.

Figures are built on matplotlib's object API (no pyplot state) and saved
with a fixed hash salt and no date metadata, so the same input always
gives the same bytes. Every matrix cell is one patch with
gid "glyph-<row>-<col>".
"""
import io
import logging

import matplotlib
import numpy as np
from matplotlib.cm import ScalarMappable
from matplotlib.colors import LinearSegmentedColormap, Normalize
from matplotlib.figure import Figure
from matplotlib.patches import Circle, Ellipse, Rectangle

from core.exceptions import RenderError
from .models import RenderKind

logger = logging.getLogger(__name__)

SVG_HASH_SALT = 'errstat'
MATRIX_TOL = 1e-9
GLYPH_SPAN = 0.9

# Odd N puts an exact white at 0.5.
SIP_CMAP = LinearSegmentedColormap.from_list('sip', ['blue', 'white', 'red'], N=257)
RANK_CMAP = LinearSegmentedColormap.from_list('rank', ['white', 'darkblue'], N=256)
CORR_CMAP = matplotlib.colormaps['RdBu']

_SCALES = {
    RenderKind.CORR_ELLIPSE: (CORR_CMAP, Normalize(-1.0, 1.0)),
    RenderKind.SIP_DISK: (SIP_CMAP, Normalize(0.0, 1.0)),
    RenderKind.RANK_HEATMAP: (RANK_CMAP, Normalize(0.0, 1.0)),
}


def glyph_color(kind, value):
    """RGBA fill of a matrix cell holding ``value``."""
    cmap, norm = _SCALES[RenderKind(kind)]
    return tuple(float(c) for c in cmap(norm(value)))


def check_matrix(values, kind):
    """Returns ``values`` as a float array or raises RenderError if it breaks the kind's invariants."""
    values = np.asarray(values, dtype=float)
    if values.ndim != 2 or values.shape[0] != values.shape[1] or values.shape[0] == 0:
        raise RenderError(f"a square matrix is required, got shape {values.shape}")
    if not np.all(np.isfinite(values)):
        raise RenderError("matrix contains undefined values")
    if kind == RenderKind.CORR_ELLIPSE:
        if np.any(np.abs(values) > 1.0 + MATRIX_TOL):
            raise RenderError("correlations must lie in [-1, 1]")
    elif kind == RenderKind.SIP_DISK:
        if np.any(values < -MATRIX_TOL) or np.any(values > 1.0 + MATRIX_TOL):
            raise RenderError("SIP values must lie in [0, 1]")
        if np.any(np.abs(np.diag(values)) > MATRIX_TOL):
            raise RenderError("the SIP diagonal must be 0")
    elif kind == RenderKind.RANK_HEATMAP:
        if np.any(values < -MATRIX_TOL) or np.any(values > 1.0 + MATRIX_TOL):
            raise RenderError("rank probabilities must lie in [0, 1]")
        if np.any(np.abs(values.sum(axis=1) - 1.0) > MATRIX_TOL):
            raise RenderError("every row of a ranking probability matrix must sum to 1")
    else:
        raise RenderError(f"{RenderKind(kind).label} is not a matrix display")
    return values


def _figure(spec):
    inches = spec.size_px / 100.0
    fig = Figure(figsize=(inches, inches), dpi=100, layout='constrained')
    return fig, fig.add_subplot()


def _to_svg(fig):
    buf = io.StringIO()
    with matplotlib.rc_context({'svg.hashsalt': SVG_HASH_SALT, 'svg.fonttype': 'none'}):
        fig.savefig(buf, format='svg', metadata={'Date': None})
    return buf.getvalue()


def _glyph(kind, value, x, y):
    color = glyph_color(kind, value)
    if kind == RenderKind.CORR_ELLIPSE:
        # Positive correlations lean right, negative ones left; |r| = 1 is a segment.
        minor = max(GLYPH_SPAN * (1.0 - abs(value)), 0.02)
        angle = 45.0 if value >= 0 else -45.0
        return Ellipse((x, y), GLYPH_SPAN, minor, angle=angle, facecolor=color, edgecolor='grey', linewidth=0.3)
    if kind == RenderKind.SIP_DISK:
        return Circle((x, y), radius=0.5 * GLYPH_SPAN * np.sqrt(value), facecolor=color,
                      edgecolor='grey', linewidth=0.3)
    return Rectangle((x - 0.5, y - 0.5), 1.0, 1.0, facecolor=color, edgecolor='none')


def render_matrix(values, spec, labels=None, order=None):
    """
    SVG text of a K x K matrix display. SIP disks are shown with rows and
    columns sorted by decreasing MSIP unless ``order`` is given.
    """
    if not spec.is_matrix:
        raise RenderError(f"{spec.kind.label} is not a matrix display")
    values = check_matrix(values, spec.kind)
    k = values.shape[0]
    labels = tuple(labels) if labels is not None else tuple(f"M{i + 1}" for i in range(k))
    if len(labels) != k:
        raise RenderError(f"{len(labels)} labels for a {k} x {k} matrix")

    if spec.kind == RenderKind.SIP_DISK:
        if order is None:
            order = np.argsort(-values.sum(axis=1) / k, kind='stable')
        order = np.asarray(order, dtype=int)
        values = values[np.ix_(order, order)]
        labels = tuple(labels[i] for i in order)

    fig, ax = _figure(spec)
    for i in range(k):
        for j in range(k):
            patch = _glyph(spec.kind, values[i, j], j, k - 1 - i)
            patch.set_gid(f"glyph-{i}-{j}")
            ax.add_patch(patch)

    ax.set_xlim(-0.5, k - 0.5)
    ax.set_ylim(-0.5, k - 0.5)
    ax.set_aspect('equal')
    ax.set_yticks(range(k)[::-1], labels=labels)
    if spec.kind == RenderKind.RANK_HEATMAP:
        ax.set_xticks(range(k), labels=[str(r + 1) for r in range(k)])
        ax.set_xlabel('Rank')
    else:
        ax.set_xticks(range(k), labels=labels, rotation=90)
    ax.tick_params(length=0)

    cmap, norm = _SCALES[spec.kind]
    fig.colorbar(ScalarMappable(norm=norm, cmap=cmap), ax=ax, shrink=0.8)
    logger.debug(f"Rendered {spec.kind.label} for {k} methods")
    return _to_svg(fig)


def _draw_ecdf(ax, curve, color):
    ax.fill_between(curve.values, curve.band_lo, curve.band_hi, step='post', color=color, alpha=0.25, linewidth=0)
    ax.step(curve.values, curve.ecdf, where='post', color=color)
    ax.set_ylim(0.0, 1.05)
    ax.set_ylabel('ECDF')


def _interval_text(name, estimate):
    if estimate.value is None:
        return f"{name} = undefined"
    if estimate.lo is None:
        return f"{name} = {estimate.value:.3g}"
    return f"{name} = {estimate.value:.3g} [{estimate.lo:.3g}, {estimate.hi:.3g}]"


def render_delta_ecdf(report, spec):
    """ECDF of |e(M1)| - |e(M2)| with its band, the zero line and SIP/MG/ML/Delta MUE annotations."""
    if spec.kind != RenderKind.DELTA_ECDF:
        raise RenderError(f"expected a {RenderKind.DELTA_ECDF.label} spec, got {spec.kind.label}")
    fig, ax = _figure(spec)
    _draw_ecdf(ax, report.curve, spec.cmap)
    ax.axvline(0.0, color='black', linewidth=0.8)
    if report.uncertainty_bar:
        ax.axvspan(-report.uncertainty_bar, report.uncertainty_bar, color='orange', alpha=0.3, linewidth=0)
    lines = [
        _interval_text('SIP', report.sip),
        _interval_text('MG', report.mg),
        _interval_text('ML', report.ml),
        _interval_text('ΔMUE', report.delta_mue),
    ]
    ax.text(0.02, 0.98, '\n'.join(lines), transform=ax.transAxes, va='top', fontsize=7)
    ax.set_xlabel(f"|e({report.method_1})| - |e({report.method_2})|")
    return _to_svg(fig)


def render_abs_ecdf(curve, spec, mue, q95, label='M'):
    """ECDF of |e| for one method; MUE dotted, Q95 dashed."""
    if spec.kind != RenderKind.ABS_ECDF:
        raise RenderError(f"expected a {RenderKind.ABS_ECDF.label} spec, got {spec.kind.label}")
    fig, ax = _figure(spec)
    _draw_ecdf(ax, curve, spec.cmap)
    ax.axvline(mue, color='black', linestyle=':', label=f"MUE = {mue:.3g}")
    ax.axvline(q95, color='black', linestyle='--', label=f"Q95 = {q95:.3g}")
    ax.legend(loc='lower right', fontsize=7)
    ax.set_xlabel(f"|e({label})|")
    return _to_svg(fig)
