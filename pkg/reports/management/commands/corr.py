from correlation.models import CorrelationMethod
from correlation.serializers import CorrMatrixSerializer
from correlation.services import correlation_matrix
from reports.base import ReportCommand
from reports.models import RenderKind, RenderSpec
from reports.rendering import render_matrix
from reports.writers import matrix_frame

ON_ERRORS = 'errors'
ON_VALUES = 'values'


class Command(ReportCommand):
    help = "Rank (default) or Pearson correlation matrix of error sets or of predicted values."

    renders_svg = True

    def add_report_arguments(self, parser):
        parser.add_argument('--pearson', action='store_true', help="Pearson instead of Spearman correlation")
        parser.add_argument('--on', choices=(ON_ERRORS, ON_VALUES), default=ON_ERRORS)
        parser.add_argument('--with-reference', action='store_true',
                            help="With --on values, include the reference column")
        parser.add_argument('--size', type=int, default=480, help="Drawing size in pixels")

    def run_report(self, options):
        table, M = self.load_errors(options)
        method = CorrelationMethod.PEARSON if options['pearson'] else CorrelationMethod.SPEARMAN
        if options['on'] == ON_VALUES:
            matrix = correlation_matrix(table, method, include_reference=options['with_reference'])
        else:
            matrix = correlation_matrix(M, method)

        config = {
            'dataset': self.dataset_summary(table),
            'method': method.value,
            'on': options['on'],
            'with_reference': options['on'] == ON_VALUES and options['with_reference'],
        }
        if options.get('svg_path'):
            self.svg = render_matrix(matrix.values, RenderSpec(RenderKind.CORR_ELLIPSE, size_px=options['size']),
                                     labels=matrix.labels)
        return config, {'correlation': CorrMatrixSerializer(matrix).data}, matrix_frame(matrix.values, matrix.labels)
