from core.exceptions import InvalidInput
from estimators.models import StatKind, Statistic
from estimators.services import evaluate
from reports.base import ReportCommand, comma_list
from reports.models import RenderKind, RenderSpec
from reports.rendering import render_abs_ecdf, render_delta_ecdf, render_matrix
from reports.writers import matrix_frame
from sip.serializers import DeltaEcdfReportSerializer, EcdfCurveSerializer, SipReportSerializer
from sip.services import abs_error_ecdf, delta_ecdf, sip_matrix


class Command(ReportCommand):
    help = "SIP, mean gain/loss and MSIP for every method pair; optional ECDF of absolute-error differences."

    renders_svg = True

    def add_report_arguments(self, parser):
        parser.add_argument('--pair', type=comma_list(), help="Two method names for the Delta ECDF, e.g. A,B")
        parser.add_argument('--method', help="One method for the ECDF of its absolute errors")
        parser.add_argument('--ecdf', dest='ecdf_path', help="Write the ECDF drawing (SVG) here")
        parser.add_argument('--uncertainty-bar', type=float, help="Half-width of the dataset uncertainty band")
        parser.add_argument('--size', type=int, default=480, help="Drawing size in pixels")

    def run_report(self, options):
        table, M = self.load_errors(options)
        report = sip_matrix(M)
        config = {'dataset': self.dataset_summary(table)}
        result = {'sip': SipReportSerializer(report).data}

        if options.get('pair') or options.get('method') or options.get('ecdf_path'):
            plan = self.bootstrap_plan(options)
            config.update({'B': plan.B, 'seed': plan.seed})
        if options.get('ecdf_path') and not (options.get('pair') or options.get('method')):
            raise InvalidInput("--ecdf needs --pair A,B or --method A")
        if options.get('pair') and options.get('method') and options.get('ecdf_path'):
            raise InvalidInput("--ecdf draws one curve: give either --pair or --method")

        if options.get('pair'):
            if len(options['pair']) != 2:
                raise InvalidInput(f"--pair takes exactly two method names, got {','.join(options['pair'])}")
            first, second = options['pair']
            ecdf = delta_ecdf(
                M.column(first), M.column(second), plan,
                labels=(first, second),
                system_ids=M.system_ids,
                uncertainty_bar=options.get('uncertainty_bar'),
            )
            result['delta_ecdf'] = DeltaEcdfReportSerializer(ecdf).data
            if options.get('ecdf_path'):
                svg = render_delta_ecdf(ecdf, RenderSpec(RenderKind.DELTA_ECDF, size_px=options['size']))
                self.drawings[options['ecdf_path']] = svg

        if options.get('method'):
            E = M.column(options['method'])
            curve = abs_error_ecdf(E, plan, system_ids=M.system_ids)
            mue = float(evaluate(StatKind(Statistic.MUE), E))
            q95 = float(evaluate(self.stat_kind(options, 'q95'), E))
            result['abs_ecdf'] = {
                'method': options['method'],
                'mue': mue,
                'q95': q95,
                'curve': EcdfCurveSerializer(curve).data,
            }
            if options.get('ecdf_path'):
                svg = render_abs_ecdf(curve, RenderSpec(RenderKind.ABS_ECDF, size_px=options['size']),
                                      mue, q95, label=options['method'])
                self.drawings[options['ecdf_path']] = svg

        if options.get('svg_path'):
            self.svg = render_matrix(report.sip, RenderSpec(RenderKind.SIP_DISK, size_px=options['size']),
                                     labels=report.labels, order=report.order)
        return config, result, matrix_frame(report.sip, report.labels)
