import numpy as np
from django.test import SimpleTestCase, tag
from scipy import integrate, stats

from core.exceptions import InvalidInput
from .models import QuantileMethod, StatKind, Statistic
from .services import (
    chi2_weighted,
    cochran_model_variance,
    cochran_rescale,
    evaluate,
    hd_weights,
    mean_standard_error,
    quantile,
    quantile_hd,
    quantile_type7,
    weighted_mean,
)


class StatKindTests(SimpleTestCase):

    def test_parse_shorthands(self):
        kind = StatKind.parse('q95')
        self.assertEqual(kind.kind, Statistic.Q)
        self.assertAlmostEqual(kind.q, 0.95)
        self.assertEqual(kind.label, 'Q95')
        self.assertEqual(StatKind.parse('MUE').label, 'MUE')

    def test_parse_rejects_unknown_names(self):
        with self.assertRaises(InvalidInput):
            StatKind.parse('median')

    def test_quantile_level_must_be_inside_unit_interval(self):
        with self.assertRaises(InvalidInput):
            StatKind(Statistic.Q, q=1.0)


class QuantileTests(SimpleTestCase):

    def test_hd_weights_sum_to_one(self):
        for n in (2, 7, 100):
            self.assertAlmostEqual(float(hd_weights(n, 0.95).sum()), 1.0, places=12)

    def test_hd_median_of_symmetric_sample(self):
        self.assertAlmostEqual(quantile_hd([1, 2, 3, 4, 5], 0.5), 3.0, places=12)

    def test_hd_matches_integrated_beta_density(self):
        x = np.arange(1.0, 11.0)
        n = x.size
        for q in (0.5, 0.9):
            density = stats.beta((n + 1) * q, (n + 1) * (1 - q)).pdf
            weights = [integrate.quad(density, (i - 1) / n, i / n, epsabs=1e-13)[0] for i in range(1, n + 1)]
            self.assertAlmostEqual(quantile_hd(x[::-1], q), float(np.dot(weights, x)), places=7)
        self.assertAlmostEqual(quantile_hd(x, 0.5), 5.5, places=10)

    def test_hd_is_monotone_in_the_level(self):
        x = np.random.default_rng(21).standard_cauchy(40)
        values = [quantile_hd(x, q) for q in np.linspace(0.01, 0.99, 99)]
        self.assertTrue(np.all(np.diff(values) >= -1e-9))

    def test_hd_and_type7_medians_agree_for_large_samples(self):
        rng = np.random.default_rng(22)
        close = sum(
            abs(quantile_hd(x, 0.5) - quantile_type7(x, 0.5)) < 0.02
            for x in rng.standard_normal((200, 1000))
        )
        self.assertGreaterEqual(close, 190)

    def test_type7_matches_linear_interpolation(self):
        x = [3.0, 1.0, 4.0, 1.5, 9.0, 2.6]
        self.assertAlmostEqual(quantile_type7(x, 0.95), float(np.quantile(x, 0.95)))
        self.assertEqual(quantile_type7(x, 1.0), 9.0)

    def test_quantile_dispatch(self):
        x = np.linspace(0, 1, 11)
        self.assertEqual(quantile(x, 0.3, QuantileMethod.TYPE7), quantile_type7(x, 0.3))
        self.assertEqual(quantile(x, 0.3, 'hd'), quantile_hd(x, 0.3))

    def test_batched_evaluation_along_last_axis(self):
        rng = np.random.default_rng(1)
        x = rng.normal(size=(4, 30))
        batched = quantile_hd(x, 0.9)
        for row, value in zip(x, batched):
            self.assertAlmostEqual(quantile_hd(row, 0.9), value, places=12)

    def test_scale_and_translation_equivariance(self):
        rng = np.random.default_rng(7)
        for _ in range(1000):
            x = rng.normal(size=rng.integers(2, 40))
            a, b = rng.uniform(0.1, 10.0), rng.uniform(-5.0, 5.0)
            for method in QuantileMethod:
                q = rng.uniform(0.05, 0.95)
                expected = a * quantile(x, q, method) + b
                self.assertAlmostEqual(quantile(a * x + b, q, method), expected, delta=1e-9 * max(1.0, abs(expected)))

    def test_hd_needs_two_values(self):
        with self.assertRaises(InvalidInput):
            quantile_hd([1.0], 0.5)

    def test_hd_level_bounds(self):
        with self.assertRaises(InvalidInput):
            quantile_hd([1.0, 2.0], 0.0)


class EvaluateTests(SimpleTestCase):

    def test_statistics(self):
        E = np.array([1.0, -2.0, 3.0, -4.0])
        self.assertAlmostEqual(evaluate(StatKind(Statistic.MSE), E), -0.5)
        self.assertAlmostEqual(evaluate(StatKind(Statistic.MUE), E), 2.5)
        self.assertAlmostEqual(evaluate(StatKind(Statistic.RMSD), E), float(np.std(E, ddof=1)))
        self.assertAlmostEqual(evaluate(StatKind.parse('q95'), E), quantile_hd(np.abs(E), 0.95))

    def test_mean_standard_error(self):
        E = np.array([1.0, 2.0, 3.0, 4.0, 5.0])
        se = np.std(E, ddof=1) / np.sqrt(5)
        self.assertAlmostEqual(mean_standard_error(E), se)
        self.assertAlmostEqual(mean_standard_error(E, small_n_correction=True), se * np.sqrt(4 / 2))
        with self.assertRaises(InvalidInput):
            mean_standard_error([1.0, 2.0, 3.0], small_n_correction=True)


class WeightedMeanTests(SimpleTestCase):

    def test_weighted_mean_of_equal_uncertainties(self):
        result = weighted_mean([1.0, 3.0], [1.0, 1.0])
        self.assertAlmostEqual(result.mean, 2.0)
        self.assertAlmostEqual(result.uncertainty, 1 / np.sqrt(2))
        np.testing.assert_allclose(result.weights, [0.5, 0.5])

    def test_weighted_mean_prefers_precise_points(self):
        result = weighted_mean([0.0, 10.0], [0.1, 10.0])
        self.assertLess(result.mean, 0.01)

    def test_zero_uncertainty_is_rejected(self):
        with self.assertRaises(InvalidInput):
            weighted_mean([1.0, 2.0], [0.0, 1.0])

    def test_chi2_weighted(self):
        chi2w, _ = chi2_weighted([1.0, -1.0, 0.0], [1.0, 1.0, 1.0], 0.0)
        self.assertAlmostEqual(chi2w, 2.0)

    def test_model_variance_is_clipped_at_zero(self):
        self.assertEqual(cochran_model_variance([0.1, -0.1, 0.05], [1.0, 1.0, 1.0], 0.0), 0.0)

    def test_cochran_without_model_error_is_the_weighted_mean(self):
        E = np.array([0.1, -0.1, 0.05])
        result = cochran_rescale(E, np.ones(3))
        self.assertTrue(result.converged)
        self.assertEqual(result.sigma2_model, 0.0)
        self.assertAlmostEqual(result.mean, float(E.mean()))

    def test_cochran_model_variance_dominates_small_uncertainties(self):
        rng = np.random.default_rng(3)
        E = rng.normal(0.5, 2.0, size=200)
        result = cochran_rescale(E, np.full(200, 0.01))
        self.assertTrue(result.converged)
        self.assertGreater(result.sigma2_model, 2.0)
        self.assertAlmostEqual(result.mean, float(E.mean()), places=4)
        self.assertGreaterEqual(result.sigma2_model, 0.0)

    @tag('slow')
    def test_chi2_mean_matches_degrees_of_freedom(self):
        rng = np.random.default_rng(11)
        n = 20
        u = rng.uniform(0.5, 2.0, size=n)
        values = []
        for _ in range(10000):
            E = rng.normal(0.0, u)
            values.append(weighted_mean(E, u).chi2w)
        self.assertAlmostEqual(np.mean(values) / (n - 1), 1.0, delta=0.02)


class WeightedMeanExampleTests(SimpleTestCase):

    def test_unequal_uncertainties(self):
        result = weighted_mean([0.0, 3.0], [1.0, 2.0])
        self.assertAlmostEqual(result.mean, 0.6)
        self.assertAlmostEqual(result.uncertainty, 1 / np.sqrt(1.25))

    def test_cochran_one_step_identity(self):
        a = np.sqrt(5.0)
        self.assertAlmostEqual(cochran_model_variance([-a, 0.0, a], [1.0, 1.0, 1.0], 0.0), 4.0)

    def test_zero_uncertainties_recover_the_plain_mean(self):
        E = np.array([0.3, -1.2, 2.5, 0.7])
        result = cochran_rescale(E, np.zeros(4))
        self.assertAlmostEqual(result.sigma2_model, float(np.var(E, ddof=1)))
        self.assertAlmostEqual(result.mean, float(E.mean()))
        self.assertAlmostEqual(result.uncertainty, mean_standard_error(E))
