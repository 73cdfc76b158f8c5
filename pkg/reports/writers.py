"""JSON, CSV and SVG outputs of the report commands."""
import logging
from dataclasses import asdict
from pathlib import Path

import numpy as np
import pandas as pd
from django.conf import settings
from rest_framework.renderers import JSONRenderer

from datasets.services import (
    METHOD_UNCERTAINTY_PREFIX,
    REFERENCE_COLUMN,
    REFERENCE_UNCERTAINTY_COLUMN,
    SYSTEM_COLUMN,
)

logger = logging.getLogger(__name__)

CSV_FLOAT_FORMAT = '%.10g'


def report_document(command, config, report):
    return {
        'schema_version': settings.ERRSTAT_REPORT_SCHEMA_VERSION,
        'command': command,
        'config': config,
        'report': report,
    }


def render_json(document):
    """UTF-8 JSON bytes, indented by 2, newline-terminated."""
    return JSONRenderer().render(document, renderer_context={'indent': 2}) + b'\n'


def write_json(path, document):
    Path(path).write_bytes(render_json(document))
    logger.info(f"JSON report written to {path}")


def write_csv(path, frame):
    frame.to_csv(path, index=False, float_format=CSV_FLOAT_FORMAT, lineterminator='\n')
    logger.info(f"CSV written to {path}")


def write_svg(path, svg):
    Path(path).write_text(svg, encoding='utf-8')
    logger.info(f"SVG written to {path}")


def rows_frame(rows):
    """One CSV row per dataclass record."""
    return pd.DataFrame([asdict(row) for row in rows])


def matrix_frame(values, labels, columns=None, corner='Method'):
    """K x K grid with a label column in front."""
    columns = list(columns) if columns is not None else list(labels)
    frame = pd.DataFrame(np.asarray(values, dtype=float), columns=columns)
    frame.insert(0, corner, list(labels))
    return frame


def benchmark_frame(table):
    """A BenchmarkTable in the input CSV layout: System, Ref, [uRef], methods, u:<method>."""
    data = {SYSTEM_COLUMN: list(table.system_ids), REFERENCE_COLUMN: table.reference}
    if table.ref_uncertainty is not None:
        data[REFERENCE_UNCERTAINTY_COLUMN] = table.ref_uncertainty
    data.update(table.methods)
    for name, values in table.calc_uncertainty.items():
        data[f"{METHOD_UNCERTAINTY_PREFIX}{name}"] = values
    return pd.DataFrame(data)
