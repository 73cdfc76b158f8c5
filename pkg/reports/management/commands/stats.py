import logging

import numpy as np
import pandas as pd

from core.exceptions import InvalidInput
from estimators.serializers import WeightedMeanSerializer
from estimators.services import cochran_rescale, evaluate, weighted_mean
from inference.services import bootstrap_se
from reports.base import ReportCommand

logger = logging.getLogger(__name__)


class Command(ReportCommand):
    help = "Per-method statistic with its bootstrap standard error (and weighted means with --weighted)."

    def add_report_arguments(self, parser):
        parser.add_argument('--stat', default='mue', help="mse, mue, rmsd, q or qNN (e.g. q95)")
        parser.add_argument('--weighted', action='store_true',
                            help="Also report the weighted mean and Cochran-reweighted mean of each method")

    def run_report(self, options):
        table, M = self.load_errors(options)
        kind = self.stat_kind(options, options['stat'])
        plan = self.bootstrap_plan(options)
        if options['weighted'] and M.error_uncertainty is None:
            raise InvalidInput("--weighted needs uncertainty columns (uRef or u:<method>) in the dataset")

        methods = []
        for name in M.method_names:
            E = M.column(name)
            entry = {
                'method': name,
                'value': float(evaluate(kind, E)),
                'se': bootstrap_se(E, kind, plan),
            }
            if options['weighted']:
                u = M.uncertainty_of(name)
                # Inverse-variance weights need u > 0 everywhere; Cochran's model variance does not.
                if np.all(u > 0):
                    entry['weighted'] = WeightedMeanSerializer(weighted_mean(E, u)).data
                else:
                    logger.warning(f"No weighted mean for {name}: {int(np.sum(u <= 0))} system(s) have zero uncertainty")
                    entry['weighted'] = None
                entry['cochran'] = WeightedMeanSerializer(cochran_rescale(E, u)).data
            methods.append(entry)

        config = {
            'dataset': self.dataset_summary(table),
            'stat': kind.label,
            'quantile_method': kind.quantile_method.value if kind.is_quantile else None,
            'B': plan.B,
            'seed': plan.seed,
            'weighted': options['weighted'],
        }
        frame = pd.DataFrame([
            {
                'method': m['method'],
                'stat': kind.label,
                'value': m['value'],
                'se': m['se'],
                **({
                    'weighted_mean': m['weighted']['mean'] if m['weighted'] else None,
                    'weighted_u': m['weighted']['uncertainty'] if m['weighted'] else None,
                    'cochran_mean': m['cochran']['mean'],
                    'cochran_u': m['cochran']['uncertainty'],
                    'sigma2_model': m['cochran']['sigma2_model'],
                } if options['weighted'] else {}),
            }
            for m in methods
        ])
        return config, {'statistic': kind.label, 'methods': methods}, frame
