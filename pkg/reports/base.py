"""
Shared plumbing of the errstat subcommands: global flags, dataset loading,
option validation and the mapping of failures onto exit codes.
"""
import logging

import pandas as pd
from django.core.management.base import BaseCommand, CommandError
from rest_framework import serializers

from core.exceptions import InvalidInput
from datasets.serializers import BenchmarkSummarySerializer, TableFormatSerializer
from datasets.services import errors_from_table, load_table
from estimators.models import QuantileMethod
from estimators.serializers import StatKindSerializer
from inference.serializers import BootstrapPlanSerializer
from .writers import render_json, report_document, write_csv, write_json, write_svg

logger = logging.getLogger(__name__)

EXIT_INTERNAL_ERROR = 1
EXIT_INVALID_INPUT = 2


def comma_list(cast=str):
    """argparse type for 'a,b,c' lists."""

    def parse(text):
        items = [item.strip() for item in str(text).split(',') if item.strip()]
        if not items:
            raise ValueError("empty list")
        return [cast(item) for item in items]

    parse.__name__ = f"{cast.__name__} list"
    return parse


def validation_message(detail):
    """Flattens DRF error details into one line."""
    if isinstance(detail, dict):
        return '; '.join(f"{key}: {validation_message(value)}" for key, value in detail.items())
    if isinstance(detail, list):
        return ' '.join(validation_message(item) for item in detail)
    return str(detail)


class ReportCommand(BaseCommand):
    """
    Base for every subcommand. Subclasses implement ``run_report`` and
    return (config, report, csv_frame); ``svg`` is set when the command
    produced a drawing for --svg and ``drawings`` maps any other output
    path to its SVG text.
    """

    requires_system_checks = []
    reads_dataset = True
    renders_svg = False

    def add_arguments(self, parser):
        if self.reads_dataset:
            parser.add_argument('dataset', help="Benchmark CSV: System,Ref,[uRef],<methods>...,[u:<method>]")
            parser.add_argument('--delimiter', default=',', help="Field delimiter of the CSV")
            parser.add_argument('--lenient', action='store_true', help="Drop incomplete rows instead of failing")
        parser.add_argument('--boot', type=int, help="Bootstrap replicates B (default from settings)")
        parser.add_argument('--seed', type=int, help="RNG seed")
        parser.add_argument('--q', type=float, help="Quantile level for Q statistics")
        parser.add_argument('--quantile-method', choices=QuantileMethod.values)
        parser.add_argument('--json', dest='json_path', help="Write the JSON report here")
        parser.add_argument('--csv', dest='csv_path', help="Write the CSV table here")
        parser.add_argument('--svg', dest='svg_path', help="Write the SVG drawing here")
        self.add_report_arguments(parser)

    def add_report_arguments(self, parser):
        pass

    # --- helpers for subclasses ---

    def validated(self, serializer_class, data):
        serializer = serializer_class(data=data)
        serializer.is_valid(raise_exception=True)
        return serializer.save()

    def bootstrap_plan(self, options, nprime=None):
        data = {'boot': options.get('boot'), 'seed': options.get('seed'), 'nprime': nprime}
        return self.validated(BootstrapPlanSerializer, {k: v for k, v in data.items() if v is not None})

    def stat_kind(self, options, stat):
        data = {'stat': stat}
        if options.get('q') is not None:
            data['q'] = options['q']
        if options.get('quantile_method'):
            data['quantile_method'] = options['quantile_method']
        return self.validated(StatKindSerializer, data)

    def load_errors(self, options):
        fmt = self.validated(TableFormatSerializer, {'delimiter': options['delimiter']})
        table = load_table(options['dataset'], fmt=fmt, strict=not options['lenient'])
        return table, errors_from_table(table)

    def dataset_summary(self, table):
        summary = BenchmarkSummarySerializer(table).data
        summary['path'] = str(self.options['dataset'])
        return summary

    def print_table(self, frame):
        if frame is not None and not frame.empty:
            with pd.option_context('display.width', 200, 'display.max_columns', None):
                self.stdout.write(frame.to_string(index=False, float_format=lambda v: f"{v:.4g}"))

    # --- execution ---

    def run_report(self, options):
        raise NotImplementedError('subclasses of ReportCommand must provide a run_report() method')

    def handle(self, *args, **options):
        self.options = options
        self.svg = None
        self.drawings = {}
        if options.get('svg_path') and not self.renders_svg:
            raise CommandError(f"'{self.report_name}' does not produce an SVG drawing", returncode=EXIT_INVALID_INPUT)
        try:
            config, report, frame = self.run_report(options)
        except serializers.ValidationError as exc:
            raise CommandError(f"invalid options: {validation_message(exc.detail)}", returncode=EXIT_INVALID_INPUT)
        except InvalidInput as exc:
            raise CommandError(str(exc), returncode=EXIT_INVALID_INPUT)
        except OSError as exc:
            raise CommandError(f"cannot read input: {exc}", returncode=EXIT_INVALID_INPUT)
        except CommandError:
            raise
        except Exception as exc:
            logger.exception(f"{self.report_name} failed")
            raise CommandError(f"internal error: {exc}", returncode=EXIT_INTERNAL_ERROR)

        document = report_document(self.report_name, config, report)
        try:
            if options.get('json_path'):
                write_json(options['json_path'], document)
            if options.get('csv_path') and frame is not None:
                write_csv(options['csv_path'], frame)
            if options.get('svg_path') and self.svg is not None:
                write_svg(options['svg_path'], self.svg)
            for path, svg in self.drawings.items():
                write_svg(path, svg)
        except OSError as exc:
            raise CommandError(f"cannot write output: {exc}", returncode=EXIT_INTERNAL_ERROR)

        self.print_table(frame)
        if not options.get('json_path') and options.get('verbosity', 1) > 1:
            self.stdout.write(render_json(document).decode())

    @property
    def report_name(self):
        return self.__module__.rsplit('.', 1)[-1]
