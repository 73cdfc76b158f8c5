from inference.models import MSIP_SCORE
from inference.serializers import RankMatrixSerializer, RankOptionsSerializer
from inference.services import rank_probability_matrix
from reports.base import ReportCommand
from reports.models import RenderKind, RenderSpec
from reports.rendering import render_matrix
from reports.writers import matrix_frame


class Command(ReportCommand):
    help = "Ranking probability matrix of the methods under paired bootstrap."

    renders_svg = True

    def add_report_arguments(self, parser):
        parser.add_argument('--stat', default='mue', help="mse, mue, rmsd, q, qNN or msip")
        parser.add_argument('--nprime', type=int, help="Resample size N' (default N)")
        parser.add_argument('--orientation', help="lower (rank 1 = smallest score) or higher")
        parser.add_argument('--size', type=int, default=480, help="Drawing size in pixels")

    def run_report(self, options):
        table, M = self.load_errors(options)
        if options['stat'].strip().lower() == MSIP_SCORE:
            kind = MSIP_SCORE
        else:
            kind = self.stat_kind(options, options['stat'])
        rank_options = RankOptionsSerializer(data={'orientation': options.get('orientation')})
        rank_options.is_valid(raise_exception=True)
        orientation = rank_options.validated_data.get('orientation')
        plan = self.bootstrap_plan(options, nprime=options.get('nprime'))
        matrix = rank_probability_matrix(M, kind, plan, orientation=orientation)

        config = {
            'dataset': self.dataset_summary(table),
            'stat': matrix.stat,
            'orientation': matrix.orientation.value,
            'B': plan.B,
            'seed': plan.seed,
            'n_prime': plan.n_prime,
        }
        if options.get('svg_path'):
            self.svg = render_matrix(matrix.p, RenderSpec(RenderKind.RANK_HEATMAP, size_px=options['size']),
                                     labels=matrix.labels)
        frame = matrix_frame(matrix.p, matrix.labels, columns=[f"rank_{r + 1}" for r in range(len(matrix.labels))])
        return config, {'ranking': RankMatrixSerializer(matrix).data}, frame
