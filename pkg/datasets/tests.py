from io import BytesIO, StringIO

import numpy as np
from django.test import SimpleTestCase

from core.exceptions import DatasetError, InvalidInput
from .models import BenchmarkTable, ErrorMatrix, TableFormat
from .services import combine_uncertainty, errors_from_table, load_table, screen_uncertainty

SIMPLE_CSV = """System,Ref,A,B
s1,1.0,1.1,0.8
s2,2.0,2.2,2.1
s3,3.0,2.7,3.3
"""


class LoadTableTests(SimpleTestCase):

    def test_errors_are_reference_minus_prediction(self):
        table = load_table(StringIO(SIMPLE_CSV))
        self.assertEqual(table.system_ids, ('s1', 's2', 's3'))
        self.assertEqual(table.method_names, ('A', 'B'))
        M = errors_from_table(table)
        np.testing.assert_allclose(M.column('A'), [-0.1, -0.2, 0.3], atol=1e-12)
        np.testing.assert_allclose(M.column('B'), [0.2, -0.1, -0.3], atol=1e-12)
        self.assertIsNone(M.error_uncertainty)

    def test_comment_lines_and_blank_lines_are_skipped(self):
        text = "# produced by a benchmark run\nSystem,Ref,A\n\ns1,1,2\ns2,3,4\n"
        table = load_table(StringIO(text))
        self.assertEqual(table.n_systems, 2)

    def test_comment_character_inside_a_cell_is_data(self):
        source = BytesIO(b"System,Ref,M1\n# comment\nC#1,1.0,0.9\nb,2.0,2.1\nc,3.0,3.0\n")
        table = load_table(source)
        self.assertEqual(table.system_ids, ('C#1', 'b', 'c'))
        np.testing.assert_allclose(errors_from_table(table).column('M1'), [0.1, -0.1, 0.0], atol=1e-12)

    def test_indented_comment_line_is_skipped(self):
        table = load_table(StringIO("System,Ref,A\n  # note\ns1,1,2\ns2,3,4\n"))
        self.assertEqual(table.system_ids, ('s1', 's2'))

    def test_semicolon_delimiter(self):
        text = SIMPLE_CSV.replace(',', ';')
        table = load_table(StringIO(text), fmt=TableFormat(delimiter=';'))
        self.assertEqual(table.method_names, ('A', 'B'))

    def test_uncertainty_columns_are_combined_per_method(self):
        text = "System,Ref,uRef,A,u:A,B\ns1,1,0.3,1,0.4,1\ns2,2,0.3,2,0.4,2\n"
        M = errors_from_table(load_table(StringIO(text)))
        np.testing.assert_allclose(M.uncertainty_of('A'), [0.5, 0.5])
        np.testing.assert_allclose(M.uncertainty_of('B'), [0.3, 0.3])

    def test_malformed_header(self):
        with self.assertRaisesMessage(DatasetError, 'malformed header'):
            load_table(StringIO("Name,Ref,A\ns1,1,2\ns2,1,2\n"))

    def test_uncertainty_column_without_method(self):
        with self.assertRaisesMessage(DatasetError, "has no method column"):
            load_table(StringIO("System,Ref,A,u:B\ns1,1,2,0.1\ns2,1,2,0.1\n"))

    def test_missing_cell_names_the_row(self):
        with self.assertRaises(DatasetError) as ctx:
            load_table(StringIO("System,Ref,A\ns1,1,2\ns2,,3\ns3,1,1\n"))
        self.assertEqual(ctx.exception.row, 2)
        self.assertIn('missing or non-numeric cell', str(ctx.exception))

    def test_lenient_mode_drops_incomplete_rows(self):
        text = "System,Ref,A\ns1,1,2\ns2,abc,3\ns3,1,1\ns4,2,2\n"
        with self.assertLogs('datasets.services', level='WARNING') as logs:
            table = load_table(StringIO(text), strict=False)
        self.assertEqual(table.system_ids, ('s1', 's3', 's4'))
        self.assertIn('[2]', logs.output[0])

    def test_duplicate_system_id(self):
        with self.assertRaisesMessage(DatasetError, "duplicate system id 's1'"):
            load_table(StringIO("System,Ref,A\ns1,1,2\ns1,2,3\n"))

    def test_negative_uncertainty(self):
        with self.assertRaisesMessage(DatasetError, 'negative uncertainty'):
            load_table(StringIO("System,Ref,uRef,A\ns1,1,0.1,2\ns2,2,-0.1,3\n"))

    def test_empty_input(self):
        with self.assertRaises(DatasetError):
            load_table(StringIO(""))

    def test_single_system_is_rejected(self):
        with self.assertRaises(DatasetError):
            load_table(StringIO("System,Ref,A\ns1,1,2\n"))

    def test_dataset_error_is_invalid_input(self):
        self.assertTrue(issubclass(DatasetError, InvalidInput))


class UncertaintyTests(SimpleTestCase):

    def test_combine_uncertainty(self):
        self.assertAlmostEqual(combine_uncertainty(0.3, 0.4), 0.5)
        np.testing.assert_allclose(combine_uncertainty([0.0, 3.0], [0.0, 4.0]), [0.0, 5.0])

    def test_combine_uncertainty_rejects_negative(self):
        with self.assertRaises(InvalidInput):
            combine_uncertainty(-0.1, 0.2)

    def test_extreme_uncertainty_warns(self):
        with self.assertLogs('datasets.services', level='WARNING') as logs:
            ratio = screen_uncertainty([1.0, 1.0, 1.0, 100.0])
        self.assertEqual(ratio, 100.0)
        self.assertIn('Extreme uncertainty', logs.output[0])

    def test_all_zero_uncertainty_is_not_screened(self):
        self.assertIsNone(screen_uncertainty(np.zeros(5)))


class ErrorMatrixTests(SimpleTestCase):

    def test_vector_input_is_one_column(self):
        M = ErrorMatrix(errors=[1.0, -2.0, 3.0], method_names=('A',))
        self.assertEqual(M.errors.shape, (3, 1))
        self.assertEqual(M.system_ids, ('1', '2', '3'))

    def test_take_keeps_rows_paired(self):
        M = ErrorMatrix(errors=np.arange(8.0).reshape(4, 2), method_names=('A', 'B'))
        sub = M.take([3, 3, 0])
        np.testing.assert_array_equal(sub.errors, [[6, 7], [6, 7], [0, 1]])
        self.assertEqual(sub.system_ids, ('4', '4', '1'))

    def test_select_and_unknown_method(self):
        M = ErrorMatrix(errors=np.arange(6.0).reshape(2, 3), method_names=('A', 'B', 'C'))
        self.assertEqual(M.select(['C', 'A']).method_names, ('C', 'A'))
        with self.assertRaisesMessage(DatasetError, "unknown method 'Z'"):
            M.column('Z')

    def test_arrays_are_read_only(self):
        table = BenchmarkTable(system_ids=('a', 'b'), reference=[1.0, 2.0], methods={'A': [1.0, 1.5]})
        with self.assertRaises(ValueError):
            table.reference[0] = 5.0
