from core.exceptions import InvalidInput
from datasets.serializers import BenchmarkSummarySerializer
from reports.base import ReportCommand, comma_list
from reports.writers import benchmark_frame, rows_frame
from simulation.models import GH_SCENARIOS, QuantileStudyMode
from simulation.serializers import (
    CorrTransferRowSerializer,
    PValueSummarySerializer,
    QuantileStudyRowSerializer,
    StudyConfigEchoSerializer,
    StudyConfigSerializer,
    Type1RowSerializer,
)
from simulation.services import (
    corr_transfer_study,
    hd_convergence_study,
    pvalue_study,
    summarize_pvalues,
    synthetic_benchmark,
    type1_study,
)

GH = 'gh'
CORR_TRANSFER = 'corrtransfer'
TYPE1 = 'type1'
HD_STUDY = 'hdstudy'
PVALUE = 'pvalue'

# Grid of each study when the corresponding flag is not given.
STUDY_DEFAULTS = {
    GH: {'n': [100], 'rho': [0.9], 'reps': 100, 'scenarios': ['normal']},
    CORR_TRANSFER: {'n': [100], 'rho': [-0.9, -0.5, 0.0, 0.5, 0.9], 'reps': 1000, 'scenarios': list(GH_SCENARIOS)},
    TYPE1: {'n': [40], 'rho': [0.0], 'reps': 2000, 'scenarios': ['normal'], 'stats': ['mue', 'q95']},
    HD_STUDY: {'n': [20, 50, 100, 200, 500], 'rho': [0.0], 'reps': 10000},
    PVALUE: {'n': [20, 50, 100, 200, 500], 'rho': [0.9], 'reps': 100},
}


class Command(ReportCommand):
    help = "Synthetic benchmarks and the Monte Carlo studies validating the comparison machinery."

    reads_dataset = False

    def add_report_arguments(self, parser):
        parser.add_argument('study', choices=tuple(STUDY_DEFAULTS))
        parser.add_argument('--n', type=comma_list(int), help="Dataset sizes, e.g. 20,50,100")
        parser.add_argument('--rho', type=comma_list(float), help="Correlations, e.g. 0,0.5,0.9")
        parser.add_argument('--reps', type=int, help="Monte Carlo repetitions M")
        parser.add_argument('--scenarios', type=comma_list(), help="Margins: normal, heavy, asym, heavyasym, ...")
        parser.add_argument('--stat', type=comma_list(), help="Statistics of the type-I study, e.g. mue,q95")
        parser.add_argument('--mode', choices=QuantileStudyMode.values, help="Only one mode of the quantile study")

    def study_config(self, options):
        data = dict(STUDY_DEFAULTS[options['study']])
        for option, field in (('n', 'n'), ('rho', 'rho'), ('reps', 'reps'), ('scenarios', 'scenarios'),
                              ('stat', 'stats'), ('boot', 'boot'), ('seed', 'seed'), ('q', 'q'),
                              ('quantile_method', 'quantile_method')):
            if options.get(option) is not None:
                data[field] = options[option]
        return self.validated(StudyConfigSerializer, data)

    def run_report(self, options):
        study = options['study']
        config = self.study_config(options)
        echo = {'study': study, **StudyConfigEchoSerializer(config).data}

        if study == GH:
            return self.synthetic(options, config, echo)
        if study == CORR_TRANSFER:
            rows = corr_transfer_study(config)
            return echo, {'rows': CorrTransferRowSerializer(rows, many=True).data}, rows_frame(rows)
        if study == TYPE1:
            rows = type1_study(config)
            return echo, {'rows': Type1RowSerializer(rows, many=True).data}, rows_frame(rows)
        if study == HD_STUDY:
            modes = [options['mode']] if options.get('mode') else None
            rows = hd_convergence_study(config, modes=modes)
            echo['modes'] = modes or list(QuantileStudyMode.values)
            return echo, {'rows': QuantileStudyRowSerializer(rows, many=True).data}, rows_frame(rows)
        rows = pvalue_study(config)
        summary = summarize_pvalues(rows)
        return echo, {'summary': PValueSummarySerializer(summary, many=True).data}, rows_frame(rows)

    def synthetic(self, options, config, echo):
        if not options.get('csv_path'):
            raise InvalidInput("simulate gh writes a benchmark table: give its path with --csv")
        if len(config.n_values) != 1 or len(config.rho_values) != 1 or len(config.scenarios) != 1:
            raise InvalidInput("simulate gh takes a single --n, --rho and --scenarios value")
        scenario = config.scenarios[0]
        table = synthetic_benchmark(scenario, config.n_values[0], config.rho_values[0], config.seed)
        report = {'benchmark': BenchmarkSummarySerializer(table).data, 'scenario': scenario.name}
        return echo, report, benchmark_frame(table)
