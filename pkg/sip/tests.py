import numpy as np
from django.test import SimpleTestCase, tag

from core.exceptions import InvalidInput
from datasets.models import ErrorMatrix
from inference.models import BootstrapPlan
from .services import abs_error_deltas, abs_error_ecdf, delta_ecdf, mue_decomposition, sip_matrix, sip_pair


class SipPairTests(SimpleTestCase):

    def test_abs_error_deltas(self):
        np.testing.assert_array_equal(abs_error_deltas([1, -2], [2, 1]), [-1, 1])
        np.testing.assert_array_equal(abs_error_deltas([1, -2], [1, -2]), [0, 0])

    def test_identical_sets_are_all_ties(self):
        self.assertEqual(sip_pair([0.5, -1.0, 2.0], [0.5, -1.0, 2.0]), (0.0, 3))

    def test_total_dominance(self):
        self.assertEqual(sip_pair([0.1, 0.1], [1.0, 1.0]), (1.0, 0))

    def test_matches_element_count(self):
        rng = np.random.default_rng(2)
        for _ in range(50):
            Ei, Ej = rng.normal(size=5), rng.normal(size=5)
            wins = sum(1 for a, b in zip(Ei, Ej) if abs(a) < abs(b))
            self.assertEqual(sip_pair(Ei, Ej)[0], wins / 5)

    def test_unequal_lengths(self):
        with self.assertRaises(InvalidInput):
            sip_pair([1.0, 2.0], [1.0])


class SipMatrixTests(SimpleTestCase):

    def test_two_methods_with_total_dominance(self):
        M = ErrorMatrix(errors=[[0.1, 1.0], [0.1, 1.0]], method_names=('A', 'B'))
        report = sip_matrix(M)
        np.testing.assert_array_equal(report.sip, [[0, 1], [0, 0]])
        np.testing.assert_array_equal(report.msip, [0.5, 0.0])
        self.assertAlmostEqual(report.mg[0, 1], -0.9)
        self.assertTrue(np.isnan(report.mg[1, 0]))
        self.assertEqual(report.ordered_labels, ('A', 'B'))

    def test_identical_methods(self):
        column = np.array([0.3, -0.2, 1.5])
        M = ErrorMatrix(errors=np.column_stack([column] * 3), method_names=('A', 'B', 'C'))
        report = sip_matrix(M)
        np.testing.assert_array_equal(report.sip, np.zeros((3, 3)))
        np.testing.assert_array_equal(report.msip, np.zeros(3))
        np.testing.assert_array_equal(report.ties, np.full((3, 3), 3))

    def test_matches_pairwise_assembly(self):
        rng = np.random.default_rng(4)
        M = ErrorMatrix(errors=rng.normal(size=(6, 4)), method_names=('A', 'B', 'C', 'D'))
        report = sip_matrix(M)
        for i in range(4):
            for j in range(4):
                expected = 0.0 if i == j else sip_pair(M.errors[:, i], M.errors[:, j])[0]
                self.assertEqual(report.sip[i, j], expected)
        np.testing.assert_allclose(report.msip, report.sip.sum(axis=1) / 4)

    def test_gain_and_loss_are_mirrored(self):
        rng = np.random.default_rng(8)
        M = ErrorMatrix(errors=rng.normal(size=(40, 3)), method_names=('A', 'B', 'C'))
        report = sip_matrix(M)
        off = ~np.eye(3, dtype=bool)
        np.testing.assert_array_equal(report.ml[off], -report.mg.T[off])
        # No ties among continuous draws: SIP_ij + SIP_ji = 1.
        np.testing.assert_allclose((report.sip + report.sip.T)[off], 1.0)

    def test_shares_add_up_with_ties(self):
        rng = np.random.default_rng(12)
        for _ in range(1000):
            n = int(rng.integers(1, 30))
            errors = rng.integers(-2, 3, size=(n, 3)).astype(float)
            report = sip_matrix(ErrorMatrix(errors=errors, method_names='ABC'))
            off = ~np.eye(3, dtype=bool)
            np.testing.assert_allclose((report.sip + report.sip.T + report.ties / n)[off], 1.0, rtol=0, atol=1e-12)
            np.testing.assert_array_equal(report.ties, report.ties.T)
            np.testing.assert_array_equal(np.isnan(report.ml[off]), np.isnan(report.mg.T[off]))

    def test_pair_shares_add_up_with_ties(self):
        Ei, Ej = [1.0, -2.0, 0.5, 3.0], [-1.0, 1.0, 0.5, 2.0]
        sip_ij, ties = sip_pair(Ei, Ej)
        sip_ji, ties_ji = sip_pair(Ej, Ei)
        self.assertEqual((sip_ij, sip_ji, ties, ties_ji), (0.0, 0.5, 2, 2))

    def test_invariant_under_common_rescaling(self):
        rng = np.random.default_rng(9)
        errors = rng.normal(size=(25, 3))
        a = sip_matrix(ErrorMatrix(errors=errors, method_names=('A', 'B', 'C')))
        b = sip_matrix(ErrorMatrix(errors=3.5 * errors, method_names=('A', 'B', 'C')))
        np.testing.assert_array_equal(a.sip, b.sip)

    def test_single_method(self):
        with self.assertRaises(InvalidInput):
            sip_matrix(ErrorMatrix(errors=[1.0, 2.0], method_names=('A',)))


class MueDecompositionTests(SimpleTestCase):

    def test_identical_sets(self):
        self.assertEqual(mue_decomposition([1.0, -2.0], [1.0, -2.0]), (0.0, 0.0))

    def test_total_dominance(self):
        delta, rebuilt = mue_decomposition([0.1, 0.1], [1.0, 1.0])
        self.assertAlmostEqual(delta, -0.9)
        self.assertAlmostEqual(rebuilt, -0.9)

    def test_identity_on_random_pairs(self):
        rng = np.random.default_rng(12)
        for _ in range(1000):
            n = int(rng.integers(1, 101))
            Ei, Ej = rng.normal(size=n), rng.standard_t(3, size=n)
            delta, rebuilt = mue_decomposition(Ei, Ej)
            scale = np.abs(Ei).mean() + np.abs(Ej).mean()
            self.assertAlmostEqual(delta, rebuilt, delta=1e-12 * scale)


class EcdfTests(SimpleTestCase):
    plan = BootstrapPlan(B=200, seed=3)

    def test_identical_sets_give_a_step_at_zero(self):
        E = np.array([0.4, -1.0, 2.2, 0.1])
        report = delta_ecdf(E, E, self.plan)
        np.testing.assert_array_equal(report.deltas, np.zeros(4))
        self.assertEqual(report.sip.value, 0.0)
        self.assertIsNone(report.mg.value)
        self.assertIsNone(report.ml.value)

    def test_report_matches_point_statistics(self):
        rng = np.random.default_rng(6)
        Ei, Ej = rng.normal(size=50), rng.normal(0.3, 1.2, size=50)
        report = delta_ecdf(Ei, Ej, self.plan, labels=('A', 'B'), uncertainty_bar=0.1)
        self.assertEqual(report.sip.value, sip_pair(Ei, Ej)[0])
        self.assertLessEqual(report.sip.lo, report.sip.hi)
        self.assertAlmostEqual(report.delta_mue.value, mue_decomposition(Ei, Ej)[0])
        self.assertEqual(report.method_1, 'A')

    def test_band_contains_the_ecdf(self):
        rng = np.random.default_rng(10)
        curve = abs_error_ecdf(rng.normal(size=40), self.plan)
        self.assertTrue(np.all(np.diff(curve.values) >= 0))
        self.assertEqual(curve.ecdf[-1], 1.0)
        self.assertTrue(np.all(curve.band_lo <= curve.ecdf))
        self.assertTrue(np.all(curve.ecdf <= curve.band_hi))

    def test_negative_uncertainty_bar(self):
        with self.assertRaises(InvalidInput):
            delta_ecdf([1.0, 2.0], [2.0, 1.0], self.plan, uncertainty_bar=-1.0)


@tag('slow')
class SipIntervalCoverageTests(SimpleTestCase):

    def test_interval_covers_the_population_gain_share(self):
        # |E_j| = 1 and |E_i| < 1 with probability 0.8, so the population SIP is 0.8.
        rng = np.random.default_rng(2718)
        covered = 0
        for rep in range(500):
            better = rng.random(30) < 0.8
            Ei = np.where(better, rng.uniform(0.0, 0.9, 30), rng.uniform(1.1, 2.0, 30))
            Ej = np.ones(30)
            sip = delta_ecdf(Ei, Ej, BootstrapPlan(B=1000, seed=rep)).sip
            covered += sip.lo - 1e-12 <= 0.8 <= sip.hi + 1e-12
        self.assertGreaterEqual(covered, 450)
