from itertools import product

import numpy as np
from django.test import SimpleTestCase, override_settings, tag

from core.exceptions import DegenerateUncertainty, InvalidInput
from datasets.models import ErrorMatrix
from estimators.models import StatKind, Statistic
from estimators.services import evaluate
from .bootstrap import paired_resample, resample_indices, substream
from .models import MSIP_SCORE, BootstrapPlan, RankOrientation
from .services import (
    bootstrap_se,
    compare_all,
    compare_pair,
    diff_sample,
    generalized_p,
    p_inv,
    p_t_value,
    p_unc_value,
    rank_probability_matrix,
    rank_summary,
)

MUE = StatKind(Statistic.MUE)
MSE = StatKind(Statistic.MSE)


def binomial_bound(p, B):
    return 3 * np.sqrt(p * (1 - p) / B)


class BootstrapPlanTests(SimpleTestCase):

    def test_minimum_replicates(self):
        with self.assertRaises(InvalidInput):
            BootstrapPlan(B=99)

    def test_n_prime_cannot_exceed_n(self):
        with self.assertRaises(InvalidInput):
            BootstrapPlan(B=100, n_prime=20).resample_size(10)

    def test_negative_seed(self):
        with self.assertRaises(InvalidInput):
            BootstrapPlan(seed=-1)


class ResampleTests(SimpleTestCase):

    def test_pairing_is_preserved(self):
        errors = np.column_stack([np.arange(10.0), 100 + np.arange(10.0)])
        M = ErrorMatrix(errors=errors, method_names=('A', 'B'))
        sample = paired_resample(M, BootstrapPlan(B=100, seed=7), 3)
        np.testing.assert_array_equal(sample.errors[:, 1] - sample.errors[:, 0], np.full(10, 100.0))
        again = paired_resample(M, BootstrapPlan(B=100, seed=7), 3)
        np.testing.assert_array_equal(sample.errors, again.errors)

    def test_n_prime_sets_the_resample_size(self):
        indices = resample_indices(BootstrapPlan(B=100, seed=1, n_prime=5), 20)
        self.assertEqual(indices.shape, (100, 5))
        self.assertTrue(np.all((indices >= 0) & (indices < 20)))

    def test_indices_do_not_depend_on_workers(self):
        plan = BootstrapPlan(B=250, seed=99)
        np.testing.assert_array_equal(resample_indices(plan, 17, workers=1), resample_indices(plan, 17, workers=4))

    def test_substreams_differ(self):
        a = substream(5, 0).integers(0, 2 ** 32, size=4)
        b = substream(5, 1).integers(0, 2 ** 32, size=4)
        self.assertFalse(np.array_equal(a, b))


class BootstrapSeTests(SimpleTestCase):

    def test_constant_vector(self):
        self.assertEqual(bootstrap_se(np.full(20, 1.5), MUE, BootstrapPlan(B=200)), 0.0)

    def test_mean_uncertainty_matches_the_analytical_formula(self):
        rng = np.random.default_rng(21)
        hits = 0
        for trial in range(40):
            E = rng.normal(size=100)
            analytical = E.std(ddof=1) / np.sqrt(100)
            se = bootstrap_se(E, MSE, BootstrapPlan(B=500, seed=trial))
            hits += abs(se / analytical - 1) <= 0.25
        self.assertGreaterEqual(hits, 38)


class DiffSampleTests(SimpleTestCase):
    plan = BootstrapPlan(B=300, seed=11)

    def test_identical_sets(self):
        E = np.array([0.2, -1.0, 0.7, 3.0])
        np.testing.assert_array_equal(diff_sample(E, E, MUE, self.plan), np.zeros(300))

    def test_dominated_pair(self):
        rng = np.random.default_rng(0)
        Ei = rng.uniform(0.0, 1.0, size=30)
        Ej = rng.uniform(2.0, 3.0, size=30)
        for kind in (MUE, StatKind.parse('q95')):
            self.assertTrue(np.all(diff_sample(Ei, Ej, kind, self.plan) < 0))

    def test_mean_matches_exhaustive_enumeration(self):
        Ei = np.array([0.3, -1.1, 2.0])
        Ej = np.array([0.9, 0.4, -0.5])
        exact = np.array([
            evaluate(MUE, Ei[list(rows)]) - evaluate(MUE, Ej[list(rows)])
            for rows in product(range(3), repeat=3)
        ])
        B = 20000
        d = diff_sample(Ei, Ej, MUE, BootstrapPlan(B=B, seed=2024))
        self.assertLessEqual(abs(d.mean() - exact.mean()), 3 * exact.std() / np.sqrt(B))

    def test_unequal_lengths(self):
        with self.assertRaises(InvalidInput):
            diff_sample([1.0, 2.0], [1.0, 2.0, 3.0], MUE, self.plan)


class PValueTests(SimpleTestCase):

    def test_p_t_value(self):
        self.assertEqual(p_t_value(1.0, 1.0, 0.5), (0.0, 1.0))
        self.assertAlmostEqual(p_t_value(1.96, 0.0, 1.0)[1], 0.05, delta=1e-3)
        self.assertAlmostEqual(p_t_value(3.0, 0.0, 1.0)[1], 0.0027, delta=1e-4)

    def test_degenerate_uncertainty(self):
        with self.assertRaisesMessage(DegenerateUncertainty, 'degenerate uncertainty'):
            p_t_value(1.0, 2.0, 0.0)
        with self.assertRaises(DegenerateUncertainty):
            p_unc_value(1.0, 2.0, 0.0, 0.0)

    def test_p_unc_value(self):
        self.assertAlmostEqual(p_unc_value(1.96 * np.sqrt(2), 0.0, 1.0, 1.0)[1], 0.05, delta=1e-3)
        self.assertEqual(p_unc_value(2.0, 2.0, 1.0, 1.0)[1], 1.0)

    def test_positive_correlation_makes_p_unc_conservative(self):
        _, p_t = p_t_value(1.0, 0.5, 0.1)
        _, p_unc = p_unc_value(1.0, 0.5, 0.2, 0.2)
        self.assertGreaterEqual(p_unc, p_t)

    def test_generalized_p(self):
        self.assertEqual(generalized_p(np.zeros(100)), 1.0)
        self.assertEqual(generalized_p(-np.ones(100)), 0.0)
        self.assertEqual(generalized_p(np.r_[-np.ones(50), np.ones(50)]), 1.0)
        with self.assertRaises(InvalidInput):
            generalized_p(np.ones(99))

    def test_p_inv(self):
        self.assertEqual(p_inv(np.ones(100), 2.0, 1.0), 0.0)
        self.assertEqual(p_inv(np.r_[-np.ones(50), np.ones(50)], 2.0, 1.0), 0.5)
        self.assertEqual(p_inv(np.ones(100), 1.0, 1.0), 0.5)

    def test_p_inv_is_half_p_g_without_ties(self):
        d = np.random.default_rng(30).normal(1.0, 1.0, size=1000)
        self.assertEqual(p_inv(d, 1.0, 0.0), generalized_p(d) / 2)


class ComparePairTests(SimpleTestCase):
    plan = BootstrapPlan(B=400, seed=5)

    def setUp(self):
        rng = np.random.default_rng(17)
        self.errors = np.column_stack([
            rng.normal(0.0, 1.0, size=60),
            rng.uniform(5.0, 6.0, size=60),
            rng.normal(0.0, 1.2, size=60),
        ])
        self.M = ErrorMatrix(errors=self.errors, method_names=('A', 'B', 'C'))

    def test_identical_columns(self):
        M = ErrorMatrix(errors=np.column_stack([self.errors[:, 0]] * 2), method_names=('A', 'A2'))
        result = compare_pair(M, 'A', 'A2', MUE, self.plan)
        self.assertTrue(result.degenerate)
        self.assertEqual(result.p_g, 1.0)
        self.assertEqual(result.p_inv, 0.5)
        self.assertEqual(result.p_t, 1.0)
        self.assertEqual(result.xi, 0.0)
        self.assertEqual(result.n_zero_diffs, 400)

    def test_dominated_pair(self):
        result = compare_pair(self.M, 'A', 'B', MUE, self.plan)
        self.assertEqual(result.p_g, 0.0)
        self.assertEqual(result.p_inv, 0.0)
        self.assertTrue(result.significant)
        self.assertLess(result.diff_hi, 0.0)

    def test_statistic_is_computed_on_the_original_sample(self):
        result = compare_pair(self.M, 0, 2, MUE, self.plan)
        self.assertEqual(result.s1, evaluate(MUE, self.errors[:, 0]))
        self.assertEqual(result.s2, evaluate(MUE, self.errors[:, 2]))
        self.assertEqual(result.B, 400)

    def test_same_method_twice(self):
        with self.assertRaises(InvalidInput):
            compare_pair(self.M, 'A', 0, MUE, self.plan)

    def test_compare_all_covers_every_pair(self):
        pairs = [(c.method_1, c.method_2) for c in compare_all(self.M, MUE, self.plan)]
        self.assertEqual(pairs, [('A', 'B'), ('A', 'C'), ('B', 'C')])

    def test_small_n_warning(self):
        M = ErrorMatrix(errors=self.errors[:10, [0, 2]], method_names=('A', 'C'))
        with self.assertLogs('inference.services', level='WARNING') as logs:
            compare_pair(M, 0, 1, MUE, self.plan)
        self.assertIn('N=10 is small', logs.output[0])

    def test_identical_reports_across_worker_counts(self):
        with override_settings(ERRSTAT_WORKERS=1):
            serial = compare_pair(self.M, 'A', 'C', StatKind.parse('q95'), self.plan)
        with override_settings(ERRSTAT_WORKERS=4):
            threaded = compare_pair(self.M, 'A', 'C', StatKind.parse('q95'), self.plan)
        self.assertEqual(serial, threaded)


class RankMatrixTests(SimpleTestCase):
    plan = BootstrapPlan(B=300, seed=8)

    def test_disjoint_ranges_give_the_identity(self):
        rng = np.random.default_rng(1)
        errors = np.column_stack([rng.uniform(3 * j, 3 * j + 1, size=20) for j in range(4)])
        ranks = rank_probability_matrix(ErrorMatrix(errors=errors, method_names='ABCD'), MUE, self.plan)
        np.testing.assert_array_equal(ranks.p, np.eye(4))
        self.assertEqual(ranks.reference_ranks, (1, 2, 3, 4))
        self.assertEqual([s.mode for s in ranks.summary], [1, 2, 3, 4])

    def test_doubly_stochastic(self):
        rng = np.random.default_rng(2)
        M = ErrorMatrix(errors=rng.normal(size=(25, 5)), method_names='ABCDE')
        for kind in (MUE, StatKind.parse('q95'), MSIP_SCORE):
            p = rank_probability_matrix(M, kind, self.plan).p
            np.testing.assert_allclose(p.sum(axis=0), 1.0, atol=1e-12)
            np.testing.assert_allclose(p.sum(axis=1), 1.0, atol=1e-12)

    def test_identical_columns_follow_the_index_tie_break(self):
        column = np.random.default_rng(3).normal(size=15)
        M = ErrorMatrix(errors=np.column_stack([column, column]), method_names=('A', 'B'))
        np.testing.assert_array_equal(rank_probability_matrix(M, MUE, self.plan).p, np.eye(2))

    def test_msip_ranks_highest_first(self):
        rng = np.random.default_rng(4)
        errors = np.column_stack([rng.uniform(0, 1, 20), rng.uniform(2, 3, 20)])
        ranks = rank_probability_matrix(ErrorMatrix(errors=errors, method_names='AB'), MSIP_SCORE, self.plan)
        self.assertEqual(ranks.orientation, RankOrientation.HIGHER_IS_RANK1)
        self.assertEqual(ranks.stat, 'MSIP')
        np.testing.assert_array_equal(ranks.p, np.eye(2))

    def test_two_systems_match_exhaustive_enumeration(self):
        # Resamples of N=2: MUE(A) is 1, 2.5, 2.5 or 4 and MUE(B) is always 2.
        M = ErrorMatrix(errors=[[1.0, 2.0], [4.0, 2.0]], method_names=('A', 'B'))
        B = 4000
        p = rank_probability_matrix(M, MUE, BootstrapPlan(B=B, seed=77)).p
        self.assertLessEqual(abs(p[0, 0] - 0.25), binomial_bound(0.25, B))
        self.assertLessEqual(abs(p[1, 0] - 0.75), binomial_bound(0.75, B))

    def test_one_method(self):
        with self.assertRaises(InvalidInput):
            rank_probability_matrix(ErrorMatrix(errors=[1.0, 2.0], method_names='A'), MUE, self.plan)

    def test_identical_matrices_across_worker_counts(self):
        rng = np.random.default_rng(5)
        M = ErrorMatrix(errors=rng.normal(size=(30, 3)), method_names='ABC')
        with override_settings(ERRSTAT_WORKERS=1):
            serial = rank_probability_matrix(M, MUE, self.plan).p
        with override_settings(ERRSTAT_WORKERS=3):
            threaded = rank_probability_matrix(M, MUE, self.plan).p
        np.testing.assert_array_equal(serial, threaded)


class RankSummaryTests(SimpleTestCase):

    def test_identity(self):
        summary = rank_summary(np.eye(3), labels=('A', 'B', 'C'))
        self.assertEqual([(s.mode, s.probability, s.interval_lo, s.interval_hi) for s in summary],
                         [(1, 1.0, 1, 1), (2, 1.0, 2, 2), (3, 1.0, 3, 3)])

    def test_uniform_row_needs_every_rank(self):
        summary = rank_summary(np.full((4, 4), 0.25))
        self.assertEqual((summary[0].interval_lo, summary[0].interval_hi), (1, 4))
        self.assertEqual(summary[0].mode, 1)

    def test_ninety_percent_window(self):
        p = np.array([[0.5, 0.4, 0.1], [0.4, 0.5, 0.1], [0.1, 0.1, 0.8]])
        first = rank_summary(p)[0]
        self.assertEqual((first.mode, first.interval_lo, first.interval_hi), (1, 1, 2))


@tag('slow')
class SelfConsistencyTests(SimpleTestCase):

    def test_replicate_count_barely_moves_the_uncertainty(self):
        E = np.random.default_rng(40).normal(size=80)
        se_1000 = bootstrap_se(E, MUE, BootstrapPlan(B=1000, seed=1))
        se_4000 = bootstrap_se(E, MUE, BootstrapPlan(B=4000, seed=2))
        self.assertLess(abs(se_1000 / se_4000 - 1), 0.15)


class ExhaustiveBootstrapTests(SimpleTestCase):
    """Monte Carlo p_g, P_inv and P_r against every equally likely paired resample."""

    B = 4000
    # Integer errors make null differences exact; the last pair has none.
    PAIRS = (
        ([1.0, 4.0], [2.0, 2.0]),
        ([1.0, 3.0, 2.0], [2.0, 1.0, 2.0]),
        ([0.3, -1.1, 2.0], [0.9, 0.4, -0.5]),
    )

    def exact(self, Ei, Ej):
        n = len(Ei)
        d = np.array([
            evaluate(MUE, Ei[list(rows)]) - evaluate(MUE, Ej[list(rows)])
            for rows in product(range(n), repeat=n)
        ])
        observed = np.sign(evaluate(MUE, Ei) - evaluate(MUE, Ej))
        score = (d < 0) + 0.5 * (d == 0)
        return {
            'p_star': score.mean(),
            'score_var': score.var(),
            'p_inv': float(np.mean(np.sign(d) == -observed)),
            'first': float(np.mean(d <= 0)),
        }

    def test_small_pairs(self):
        for seed, (Ei, Ej) in enumerate(self.PAIRS):
            Ei, Ej = np.array(Ei), np.array(Ej)
            exact = self.exact(Ei, Ej)
            self.assertLess(exact['p_star'], 0.4)
            M = ErrorMatrix(errors=np.column_stack([Ei, Ej]), method_names='AB')
            plan = BootstrapPlan(B=self.B, seed=100 + seed)
            with self.assertLogs('inference.services', level='WARNING'):
                comparison = compare_pair(M, 'A', 'B', MUE, plan)
                ranks = rank_probability_matrix(M, MUE, plan)

            p_g_bound = 6 * np.sqrt(exact['score_var'] / self.B)
            self.assertLessEqual(abs(comparison.p_g - 2 * exact['p_star']), p_g_bound)
            self.assertLessEqual(abs(comparison.p_inv - exact['p_inv']), binomial_bound(exact['p_inv'], self.B))
            self.assertLessEqual(abs(ranks.p[0, 0] - exact['first']), binomial_bound(exact['first'], self.B))
            self.assertAlmostEqual(ranks.p[0, 0] + ranks.p[1, 0], 1.0, places=12)
