import numpy as np
from django.test import SimpleTestCase, override_settings, tag

from core.exceptions import InvalidInput
from correlation.services import pearson
from datasets.services import errors_from_table
from estimators.models import StatKind, Statistic
from estimators.services import evaluate
from inference.bootstrap import substream
from .generators import correlated_pairs, folded_normal_quantile, gh_moments, gh_transform, population_folded_stats
from .models import REFERENCE_SET_2, SCENARIOS, GHParams, StudyConfig
from .serializers import StudyConfigSerializer
from .services import (
    corr_transfer_study,
    hd_convergence_study,
    pvalue_study,
    summarize_pvalues,
    synthetic_benchmark,
    type1_study,
)

NORMAL = GHParams()
MUE = StatKind(Statistic.MUE)
Q95 = StatKind(Statistic.Q, q=0.95)


class GHTransformTests(SimpleTestCase):

    def test_normal_special_case(self):
        z = np.linspace(-3, 3, 13)
        np.testing.assert_array_equal(gh_transform(z, 0.0, 0.0), z)

    def test_tail_weight(self):
        self.assertAlmostEqual(gh_transform(1.0, 0.0, 0.2), np.exp(0.1), places=12)

    def test_zero_is_a_fixed_point(self):
        self.assertEqual(gh_transform(0.0, 0.2, 0.0), 0.0)

    def test_strictly_increasing(self):
        z = np.linspace(-6, 6, 2001)
        for g, h in ((0.0, 0.0), (0.2, 0.0), (0.0, 0.2), (0.2, 0.2), (1.0, 0.4)):
            self.assertTrue(np.all(np.diff(gh_transform(z, g, h)) > 0))

    def test_continuous_in_g(self):
        z = np.linspace(-4, 4, 81)
        for h in (0.0, 0.2):
            gap = np.abs(gh_transform(z, 1e-8, h) - gh_transform(z, 0.0, h))
            self.assertLess(gap.max(), 1e-6)

    def test_negative_parameters(self):
        with self.assertRaises(InvalidInput):
            gh_transform(1.0, -0.1, 0.0)

    def test_moments(self):
        self.assertEqual(gh_moments(0.0, 0.0), (0.0, 1.0))
        mean, sd = gh_moments(0.0, 0.2)
        self.assertEqual(mean, 0.0)
        self.assertAlmostEqual(sd, np.sqrt(0.6 ** -1.5), places=8)
        with self.assertRaises(InvalidInput):
            gh_moments(0.0, 0.5)

    def test_moments_of_the_lognormal_case(self):
        # h = 0 gives a shifted lognormal: (exp(g z) - 1) / g.
        g = 0.2
        mean, sd = gh_moments(g, 0.0)
        self.assertAlmostEqual(mean, np.expm1(g ** 2 / 2) / g, places=12)
        self.assertAlmostEqual(sd, np.sqrt(np.exp(g ** 2) * np.expm1(g ** 2)) / g, places=12)

    def test_moments_match_quadrature(self):
        z = np.linspace(-40.0, 40.0, 800001)
        density = np.exp(-0.5 * z ** 2) / np.sqrt(2.0 * np.pi)
        for g, h in ((0.2, 0.2), (0.0, 0.1), (0.5, 0.1)):
            x = gh_transform(z, g, h)
            mean = np.trapz(x * density, z)
            sd = np.sqrt(np.trapz((x - mean) ** 2 * density, z))
            got_mean, got_sd = gh_moments(g, h)
            self.assertAlmostEqual(got_mean, mean, places=7)
            self.assertAlmostEqual(got_sd, sd, places=7)

    def test_moments_of_scenario_margins_are_finite(self):
        for name in ('heavy', 'asym', 'heavyasym'):
            mean, sd = gh_moments(SCENARIOS[name].margin1.g, SCENARIOS[name].margin1.h)
            self.assertTrue(np.isfinite(mean) and np.isfinite(sd) and sd > 1.0)


class CorrelatedPairsTests(SimpleTestCase):

    def test_comonotone_pair(self):
        E1, E2 = correlated_pairs(1.0, NORMAL, NORMAL, 50, substream(1, 0))
        np.testing.assert_array_equal(E1, E2)

    def test_prescribed_correlation(self):
        for rho in (0.0, 0.7, -0.7):
            E1, E2 = correlated_pairs(rho, NORMAL, NORMAL, 100000, substream(2, 0))
            self.assertAlmostEqual(pearson(E1, E2), rho, delta=0.02)

    def test_margins_are_standardized(self):
        for name in ('heavy', 'asym', 'heavyasym'):
            margin = SCENARIOS[name].margin1
            E1, _ = correlated_pairs(0.0, margin, margin, 200000, substream(3, 0))
            self.assertAlmostEqual(E1.mean(), 0.0, delta=0.02)
            self.assertAlmostEqual(E1.std(), 1.0, delta=0.03)

    def test_shape_argument(self):
        E1, E2 = correlated_pairs(0.5, NORMAL, NORMAL, (4, 7), substream(4, 0))
        self.assertEqual(E1.shape, (4, 7))
        self.assertEqual(E2.shape, (4, 7))

    def test_rho_out_of_range(self):
        with self.assertRaises(InvalidInput):
            correlated_pairs(1.2, NORMAL, NORMAL, 10, substream(0, 0))


class FoldedNormalTests(SimpleTestCase):

    def test_reference_values(self):
        _, _, mue, q95 = population_folded_stats(0.0, 1.1)
        self.assertEqual((round(mue, 2), round(q95, 2)), (0.88, 2.16))
        mse, rmsd, mue, q95 = population_folded_stats(0.1, 1.0)
        self.assertEqual((mse, rmsd), (0.1, 1.0))
        self.assertEqual((round(mue, 2), round(q95, 2)), (0.80, 1.97))

    def test_centered_mue(self):
        for sigma in (0.5, 1.0, 2.3):
            self.assertAlmostEqual(population_folded_stats(0.0, sigma)[2], sigma * np.sqrt(2 / np.pi), places=10)

    def test_centered_quantile_is_the_normal_one(self):
        self.assertAlmostEqual(folded_normal_quantile(0.0, 1.0, 0.95), 1.959964, places=5)

    def test_sigma_must_be_positive(self):
        with self.assertRaises(InvalidInput):
            population_folded_stats(0.0, 0.0)

    @tag('slow')
    def test_empirical_reference_values(self):
        rng = substream(123, 0)
        for (mu, sigma), (mue, q95) in (((0.0, 1.1), (0.88, 2.16)), ((0.1, 1.0), (0.80, 1.97))):
            sample = mu + sigma * rng.standard_normal(1_000_000)
            self.assertAlmostEqual(evaluate(MUE, sample), mue, delta=0.01)
            self.assertAlmostEqual(evaluate(Q95, sample), q95, delta=0.01)


class StudyConfigTests(SimpleTestCase):

    def test_bounds(self):
        with self.assertRaises(InvalidInput):
            StudyConfig(M=99)
        with self.assertRaises(InvalidInput):
            StudyConfig(n_values=(5,))
        with self.assertRaises(InvalidInput):
            StudyConfig(rho_values=(1.5,))

    def test_serializer_builds_the_config(self):
        serializer = StudyConfigSerializer(data={
            'n': [20, 50], 'rho': [0.5], 'reps': 200, 'boot': 150, 'scenarios': ['heavy'],
            'stats': ['q90'], 'seed': 9,
        })
        serializer.is_valid(raise_exception=True)
        config = serializer.save()
        self.assertEqual(config.n_values, (20, 50))
        self.assertEqual(config.B, 150)
        self.assertEqual(config.scenarios, (SCENARIOS['heavy'],))
        self.assertEqual(config.stats[0].label, 'Q90')

    def test_serializer_rejects_unknown_statistics(self):
        serializer = StudyConfigSerializer(data={'n': [20], 'rho': [0.0], 'stats': ['median']})
        self.assertFalse(serializer.is_valid())
        self.assertIn('stats', serializer.errors)


class SmallStudyTests(SimpleTestCase):

    def test_corr_transfer_layout(self):
        config = StudyConfig(n_values=(20,), rho_values=(0.0, 0.9), M=200, seed=1)
        rows = corr_transfer_study(config)
        self.assertEqual(len(rows), 6)
        self.assertEqual([r.statistic for r in rows[:3]], ['MSE', 'MUE', 'Q95'])
        for row in rows:
            self.assertLessEqual(row.lo, row.cor)
            self.assertLessEqual(row.cor, row.hi)

    def test_full_correlation(self):
        rows = corr_transfer_study(StudyConfig(n_values=(15,), rho_values=(1.0,), M=100))
        for row in rows:
            self.assertAlmostEqual(row.cor, 1.0)

    def test_type1_layout_and_alpha(self):
        config = StudyConfig(n_values=(10,), rho_values=(0.5,), M=100, B=100, seed=3)
        rows = type1_study(config)
        self.assertEqual([r.statistic for r in rows], ['MUE', 'Q95'])
        for row in rows:
            self.assertEqual(row.alpha, row.rejections / 100)
            self.assertAlmostEqual(row.se, np.sqrt(row.alpha * (1 - row.alpha) / 100))

    def test_type1_rejects_shifted_scenarios(self):
        config = StudyConfig(n_values=(10,), M=100, B=100, scenarios=(SCENARIOS['shifted-normal'],))
        with self.assertRaises(InvalidInput):
            type1_study(config)

    def test_type1_rejects_mean_statistics(self):
        config = StudyConfig(n_values=(10,), M=100, B=100, stats=(StatKind(Statistic.MSE),))
        with self.assertRaises(InvalidInput):
            type1_study(config)

    def test_type1_is_reproducible_across_workers(self):
        config = StudyConfig(n_values=(12,), rho_values=(0.0,), M=100, B=100, seed=4, stats=(MUE,))
        with override_settings(ERRSTAT_WORKERS=1):
            serial = type1_study(config)
        with override_settings(ERRSTAT_WORKERS=3):
            threaded = type1_study(config)
        self.assertEqual(serial, threaded)

    def test_hd_study_layout(self):
        config = StudyConfig(n_values=(20, 100), M=500, seed=5)
        rows = hd_convergence_study(config)
        self.assertEqual(len(rows), 8)
        self.assertEqual({r.estimator for r in rows}, {'hd', 'type7'})
        for row in rows:
            self.assertTrue(row.q05 <= row.q25 <= row.q50 <= row.q75 <= row.q95)
            self.assertAlmostEqual(row.reference, 1.97, delta=0.005)

    def test_hd_bootstrap_is_smoother(self):
        rows = hd_convergence_study(StudyConfig(n_values=(100,), M=2000, seed=6), modes=['bootstrap'])
        distinct = {r.estimator: r.n_distinct for r in rows}
        self.assertGreater(distinct['hd'], distinct['type7'])

    def test_hd_bootstrap_pool_limit(self):
        with self.assertRaises(InvalidInput):
            hd_convergence_study(StudyConfig(n_values=(600,), M=100), modes=['bootstrap'])

    def test_pvalue_study_and_summary(self):
        rows = pvalue_study(StudyConfig(n_values=(20,), rho_values=(0.9,), M=100, B=100, seed=7))
        self.assertEqual(len(rows), 100)
        self.assertEqual([r.repetition for r in rows], list(range(100)))
        for row in rows:
            for p in (row.p_t, row.p_g_mse, row.p_g_hd, row.p_g_type7):
                self.assertTrue(0.0 <= p <= 1.0)
        summary, = summarize_pvalues(rows)
        self.assertEqual((summary.n, summary.rho, summary.repetitions), (20, 0.9, 100))

    def test_synthetic_benchmark_gives_back_the_errors(self):
        table = synthetic_benchmark(SCENARIOS['heavy'], 12, 0.6, seed=8)
        self.assertEqual(table.system_ids[0], 'S01')
        self.assertEqual(table.method_names, ('M1', 'M2'))
        M = errors_from_table(table)
        E1, E2 = correlated_pairs(0.6, SCENARIOS['heavy'].margin1, SCENARIOS['heavy'].margin2, 12, substream(8, (0,)))
        np.testing.assert_allclose(M.column('M1'), E1)
        np.testing.assert_allclose(M.column('M2'), E2)


@tag('slow')
class CorrelationTransferAcceptanceTests(SimpleTestCase):

    @classmethod
    def setUpClass(cls):
        super().setUpClass()
        config = StudyConfig(n_values=(100,), rho_values=(-0.9, 0.0, 0.9), M=4000, seed=2024)
        cls.rows = {(r.rho, r.statistic): r.cor for r in corr_transfer_study(config)}

    def test_mse_inherits_the_correlation(self):
        for rho in (-0.9, 0.0, 0.9):
            self.assertAlmostEqual(self.rows[rho, 'MSE'], rho, delta=0.05)

    def test_mue_follows_rho_squared(self):
        for rho in (-0.9, 0.9):
            self.assertAlmostEqual(self.rows[rho, 'MUE'], rho ** 2, delta=0.07)

    def test_mue_is_at_least_as_correlated_as_q95(self):
        for rho in (-0.9, 0.0, 0.9):
            self.assertGreaterEqual(self.rows[rho, 'MUE'], self.rows[rho, 'Q95'] - 0.07)


@tag('slow')
class TypeOneAcceptanceTests(SimpleTestCase):

    def alpha(self, kind, scenario, n, seed):
        config = StudyConfig(n_values=(n,), M=500, B=1000, scenarios=(SCENARIOS[scenario],), stats=(kind,), seed=seed)
        row, = type1_study(config)
        return row

    def test_mue_is_calibrated_at_forty_systems(self):
        row = self.alpha(MUE, 'normal', 40, seed=1)
        self.assertGreaterEqual(row.alpha, 0.03)
        self.assertLessEqual(row.alpha, 0.075)

    def test_q95_reaches_the_safety_limit_at_sixty_systems(self):
        for scenario in ('normal', 'heavy'):
            row = self.alpha(Q95, scenario, 60, seed=2)
            self.assertLessEqual(row.alpha, 0.075 + 2 * row.se)

    def test_q95_heavy_tails_at_thirty_systems(self):
        self.assertLessEqual(self.alpha(Q95, 'heavy', 30, seed=3).alpha, 0.13)


@tag('slow')
class QuantileAcceptanceTests(SimpleTestCase):

    @classmethod
    def setUpClass(cls):
        super().setUpClass()
        config = StudyConfig(n_values=(20, 50, 500), M=10000, seed=11)
        cls.medians = {
            (r.n, r.estimator): r.q50 for r in hd_convergence_study(config, modes=['montecarlo'])
        }
        cls.reference = folded_normal_quantile(REFERENCE_SET_2.mu, REFERENCE_SET_2.sigma)

    def test_hd_is_less_biased_for_small_samples(self):
        for n in (20, 50):
            hd = abs(self.medians[n, 'hd'] - self.reference)
            type7 = abs(self.medians[n, 'type7'] - self.reference)
            self.assertLessEqual(hd, type7)

    def test_both_estimators_converge(self):
        for estimator in ('hd', 'type7'):
            self.assertAlmostEqual(self.medians[500, estimator], self.reference, delta=0.05)


@tag('slow')
class PValueAcceptanceTests(SimpleTestCase):

    def test_bootstrap_p_tracks_the_analytical_p_for_means(self):
        config = StudyConfig(n_values=(20, 50, 100, 500), rho_values=(0.9,), M=100, B=1000, seed=12)
        rows = pvalue_study(config)
        deviation = np.mean([abs(r.p_g_mse - r.p_t) for r in rows])
        self.assertLessEqual(deviation, 0.03)
