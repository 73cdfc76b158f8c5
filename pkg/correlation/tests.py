import numpy as np
from django.test import SimpleTestCase

from core.exceptions import InvalidInput, UndefinedCorrelation
from datasets.models import BenchmarkTable, ErrorMatrix
from .models import CorrelationMethod
from .services import correlation_matrix, pearson, spearman


def midrank_oracle(x):
    """Ranks by explicit sort, tied values sharing the mean of their positions."""
    order = sorted(range(len(x)), key=lambda i: x[i])
    ranks = [0.0] * len(x)
    pos = 0
    while pos < len(order):
        end = pos
        while end + 1 < len(order) and x[order[end + 1]] == x[order[pos]]:
            end += 1
        for k in range(pos, end + 1):
            ranks[order[k]] = (pos + end) / 2 + 1
        pos = end + 1
    return ranks


class PearsonTests(SimpleTestCase):

    def test_linear_relations(self):
        x = np.array([0.3, 1.7, 2.2, 5.0])
        self.assertAlmostEqual(pearson(x, 2 * x + 1), 1.0)
        self.assertAlmostEqual(pearson(x, -x), -1.0)

    def test_hand_evaluated_value(self):
        self.assertAlmostEqual(pearson([1, 2, 3], [1, 3, 2]), 0.5)

    def test_constant_input_is_undefined(self):
        with self.assertRaisesMessage(UndefinedCorrelation, 'undefined correlation'):
            pearson([1, 1, 1], [1, 2, 3])

    def test_needs_three_pairs(self):
        with self.assertRaises(InvalidInput):
            pearson([1, 2], [2, 1])


class SpearmanTests(SimpleTestCase):

    def test_monotone_invariance(self):
        x = np.linspace(-2, 3, 20)
        self.assertAlmostEqual(spearman(x, np.exp(x)), 1.0)
        self.assertAlmostEqual(spearman(x, -x ** 3), -1.0)

    def test_ties_use_midranks(self):
        x, y = [1, 2, 2, 4], [1, 2, 3, 4]
        expected = pearson(midrank_oracle(x), midrank_oracle(y))
        self.assertAlmostEqual(spearman(x, y), expected)
        self.assertAlmostEqual(expected, 3 / np.sqrt(10))


class CorrelationMatrixTests(SimpleTestCase):

    def test_symmetric_with_unit_diagonal(self):
        rng = np.random.default_rng(5)
        M = ErrorMatrix(errors=rng.normal(size=(30, 4)), method_names=('A', 'B', 'C', 'D'))
        C = correlation_matrix(M)
        np.testing.assert_array_equal(C.values, C.values.T)
        np.testing.assert_array_equal(np.diag(C.values), np.ones(4))
        self.assertEqual(C.method, CorrelationMethod.SPEARMAN)
        self.assertEqual(C['A', 'B'], C['B', 'A'])

    def test_identical_and_negated_columns(self):
        x = np.array([0.1, -0.4, 0.9, 0.2, -1.3])
        C = correlation_matrix(np.column_stack([x, x, -x]), method='pearson')
        self.assertAlmostEqual(C[0, 1], 1.0)
        self.assertAlmostEqual(C[0, 2], -1.0)
        self.assertEqual(C.labels, ('M1', 'M2', 'M3'))

    def test_values_with_reference_column(self):
        table = BenchmarkTable(
            system_ids=('a', 'b', 'c', 'd'),
            reference=[1.0, 2.0, 3.0, 4.0],
            methods={'A': [1.1, 2.2, 2.9, 4.3], 'B': [4.0, 3.0, 2.0, 1.0]},
        )
        C = correlation_matrix(table, include_reference=True)
        self.assertEqual(C.labels, ('Ref', 'A', 'B'))
        self.assertAlmostEqual(C['Ref', 'A'], 1.0)
        self.assertAlmostEqual(C['Ref', 'B'], -1.0)

    def test_constant_column_names_the_pair(self):
        data = np.column_stack([[1.0, 2.0, 3.0], [5.0, 5.0, 5.0]])
        with self.assertRaisesMessage(UndefinedCorrelation, "'M1' and 'M2'"):
            correlation_matrix(data, labels=('M1', 'M2'))
