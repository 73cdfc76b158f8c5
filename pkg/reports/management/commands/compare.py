from django.conf import settings

from core.exceptions import InvalidInput
from inference.serializers import PairComparisonSerializer
from inference.services import compare_all, compare_pair
from reports.base import ReportCommand, comma_list
from reports.writers import rows_frame


class Command(ReportCommand):
    help = "Paired-bootstrap comparison of one statistic between methods (p_t, p_unc, p_g, P_inv)."

    def add_report_arguments(self, parser):
        parser.add_argument('--stat', default='mue', help="mse, mue, rmsd, q or qNN (e.g. q95)")
        parser.add_argument('--pair', type=comma_list(), help="Two method names, e.g. A,B; all pairs when omitted")
        parser.add_argument('--nprime', type=int, help="Resample size N' (default N)")
        parser.add_argument('--kappa', type=float, help="Threshold on xi for the 'significant' flag")

    def run_report(self, options):
        table, M = self.load_errors(options)
        kind = self.stat_kind(options, options['stat'])
        plan = self.bootstrap_plan(options, nprime=options.get('nprime'))
        kappa = options.get('kappa')
        if kappa is None:
            kappa = settings.ERRSTAT_KAPPA
        if kappa <= 0:
            raise InvalidInput(f"kappa must be positive, got {kappa}")

        if options.get('pair'):
            if len(options['pair']) != 2:
                raise InvalidInput(f"--pair takes exactly two method names, got {','.join(options['pair'])}")
            comparisons = [compare_pair(M, *options['pair'], kind, plan, kappa=kappa)]
        else:
            comparisons = compare_all(M, kind, plan, kappa=kappa)

        config = {
            'dataset': self.dataset_summary(table),
            'stat': kind.label,
            'B': plan.B,
            'seed': plan.seed,
            'n_prime': plan.n_prime,
            'kappa': kappa,
        }
        report = {'comparisons': PairComparisonSerializer(comparisons, many=True).data}
        return config, report, rows_frame(comparisons)
