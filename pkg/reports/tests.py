import json
import tempfile
import xml.etree.ElementTree as ET
from io import StringIO
from pathlib import Path
from unittest import mock

import numpy as np
import pandas as pd
from django.core.management import call_command
from django.core.management.base import CommandError
from django.test import SimpleTestCase, override_settings
from django.test.utils import captured_stderr, captured_stdout

from core.exceptions import RenderError
from datasets.models import ErrorMatrix
from inference.models import BootstrapPlan
from sip.services import abs_error_ecdf, delta_ecdf, sip_matrix
from .cli import run
from .models import RenderKind, RenderSpec
from .rendering import glyph_color, render_abs_ecdf, render_delta_ecdf, render_matrix
from .writers import matrix_frame, render_json, report_document

WHITE = (1.0, 1.0, 1.0, 1.0)


def write_benchmark(path, n=40, seed=0, uncertainty=False):
    """A synthetic benchmark CSV with methods A, B and C."""
    rng = np.random.default_rng(seed)
    ref = rng.uniform(0.0, 10.0, n)
    methods = {
        'A': ref + rng.normal(0.0, 0.5, n),
        'B': ref + rng.normal(0.3, 1.0, n),
        'C': ref + rng.normal(0.0, 0.8, n),
    }
    header = ['System', 'Ref'] + (['uRef'] if uncertainty else []) + list(methods)
    lines = [','.join(header)]
    for i in range(n):
        cells = [f"s{i + 1}", f"{ref[i]:.6f}"] + (['0.1'] if uncertainty else [])
        cells += [f"{methods[m][i]:.6f}" for m in methods]
        lines.append(','.join(cells))
    Path(path).write_text('\n'.join(lines) + '\n', encoding='utf-8')
    return path


def glyph_count(svg):
    return svg.count('id="glyph-')


class RenderSpecTests(SimpleTestCase):

    def test_minimum_size(self):
        with self.assertRaises(RenderError):
            RenderSpec(RenderKind.RANK_HEATMAP, size_px=199)

    def test_color_map_is_fixed(self):
        self.assertEqual(RenderSpec('sip_disk').cmap, 'blue-white-red')
        with self.assertRaises(RenderError):
            RenderSpec(RenderKind.SIP_DISK, cmap='viridis')

    def test_matrix_kinds(self):
        self.assertTrue(RenderSpec(RenderKind.CORR_ELLIPSE).is_matrix)
        self.assertFalse(RenderSpec(RenderKind.DELTA_ECDF).is_matrix)


class GlyphColorTests(SimpleTestCase):

    def test_half_sip_is_white(self):
        np.testing.assert_allclose(glyph_color(RenderKind.SIP_DISK, 0.5), WHITE)

    def test_sip_extremes(self):
        low, high = glyph_color(RenderKind.SIP_DISK, 0.0), glyph_color(RenderKind.SIP_DISK, 1.0)
        self.assertGreater(low[2], low[0])
        self.assertGreater(high[0], high[2])

    def test_rank_heatmap_runs_from_white(self):
        np.testing.assert_allclose(glyph_color(RenderKind.RANK_HEATMAP, 0.0), WHITE)
        dark = glyph_color(RenderKind.RANK_HEATMAP, 1.0)
        self.assertLess(dark[0], 0.1)

    def test_correlation_sign(self):
        positive, negative = glyph_color(RenderKind.CORR_ELLIPSE, 1.0), glyph_color(RenderKind.CORR_ELLIPSE, -1.0)
        self.assertGreater(positive[2], positive[0])
        self.assertGreater(negative[0], negative[2])


class RenderMatrixTests(SimpleTestCase):

    def test_one_glyph_per_cell(self):
        rng = np.random.default_rng(0)
        M = ErrorMatrix(errors=rng.normal(size=(20, 4)), method_names=('A', 'B', 'C', 'D'))
        report = sip_matrix(M)
        corr = np.corrcoef(M.errors.T)
        cases = (
            (np.eye(3), RenderKind.RANK_HEATMAP, 9),
            (report.sip, RenderKind.SIP_DISK, 16),
            (corr, RenderKind.CORR_ELLIPSE, 16),
        )
        for values, kind, expected in cases:
            svg = render_matrix(values, RenderSpec(kind, size_px=300))
            self.assertEqual(glyph_count(svg), expected)
            root = ET.fromstring(svg.encode('utf-8'))
            self.assertTrue(root.tag.endswith('svg'))

    def test_identity_heatmap_colors(self):
        svg = render_matrix(np.eye(3), RenderSpec(RenderKind.RANK_HEATMAP), labels=('A', 'B', 'C'))
        self.assertIn('#00008b', svg)
        self.assertIn('>A<', svg)

    def test_same_input_same_bytes(self):
        values = np.array([[1.0, 0.3], [0.3, 1.0]])
        spec = RenderSpec(RenderKind.CORR_ELLIPSE, size_px=250)
        self.assertEqual(render_matrix(values, spec), render_matrix(values, spec))

    def test_invalid_matrices(self):
        heatmap = RenderSpec(RenderKind.RANK_HEATMAP)
        with self.assertRaisesMessage(RenderError, 'sum to 1'):
            render_matrix([[0.5, 0.2], [0.5, 0.8]], heatmap)
        with self.assertRaisesMessage(RenderError, 'diagonal'):
            render_matrix([[0.2, 1.0], [0.0, 0.0]], RenderSpec(RenderKind.SIP_DISK))
        with self.assertRaises(RenderError):
            render_matrix([[1.0, 1.5], [1.5, 1.0]], RenderSpec(RenderKind.CORR_ELLIPSE))
        with self.assertRaises(RenderError):
            render_matrix(np.eye(2), RenderSpec(RenderKind.ABS_ECDF))
        with self.assertRaises(RenderError):
            render_matrix(np.eye(2), heatmap, labels=('A',))


class RenderEcdfTests(SimpleTestCase):
    plan = BootstrapPlan(B=100, seed=1)

    def test_delta_ecdf(self):
        rng = np.random.default_rng(2)
        report = delta_ecdf(rng.normal(size=30), rng.normal(size=30), self.plan, uncertainty_bar=0.2)
        svg = render_delta_ecdf(report, RenderSpec(RenderKind.DELTA_ECDF))
        ET.fromstring(svg.encode('utf-8'))
        self.assertIn('SIP', svg)
        with self.assertRaises(RenderError):
            render_delta_ecdf(report, RenderSpec(RenderKind.ABS_ECDF))

    def test_abs_ecdf(self):
        curve = abs_error_ecdf(np.random.default_rng(3).normal(size=30), self.plan)
        svg = render_abs_ecdf(curve, RenderSpec(RenderKind.ABS_ECDF), mue=0.8, q95=1.9, label='A')
        self.assertIn('Q95', svg)


class WriterTests(SimpleTestCase):

    def test_document_layout(self):
        document = report_document('stats', {'B': 100}, {'value': 1.5})
        self.assertEqual(list(document), ['schema_version', 'command', 'config', 'report'])
        self.assertTrue(render_json(document).endswith(b'}\n'))

    def test_matrix_frame(self):
        frame = matrix_frame(np.eye(2), ('A', 'B'), columns=['rank_1', 'rank_2'])
        self.assertEqual(list(frame.columns), ['Method', 'rank_1', 'rank_2'])
        self.assertEqual(list(frame['Method']), ['A', 'B'])


class CommandTests(SimpleTestCase):

    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.addCleanup(self.tmp.cleanup)
        self.dir = Path(self.tmp.name)
        self.dataset = str(write_benchmark(self.dir / 'bench.csv'))

    def path(self, name):
        return str(self.dir / name)

    def call(self, *args):
        call_command(*args, stdout=StringIO())

    def read_json(self, name):
        return json.loads(Path(self.path(name)).read_text(encoding='utf-8'))

    def test_stats_report(self):
        self.call('stats', self.dataset, '--boot', '200', '--seed', '42', '--json', self.path('out.json'))
        document = self.read_json('out.json')
        self.assertEqual(document['schema_version'], '1.0')
        self.assertEqual(document['command'], 'stats')
        self.assertEqual(document['config']['dataset']['n_systems'], 40)
        self.assertEqual([m['method'] for m in document['report']['methods']], ['A', 'B', 'C'])
        self.assertTrue(all(m['se'] > 0 for m in document['report']['methods']))

    def test_reports_are_reproducible(self):
        args = ('compare', self.dataset, '--boot', '150', '--seed', '3', '--stat', 'q95')
        self.call(*args, '--json', self.path('first.json'))
        with override_settings(ERRSTAT_WORKERS=4):
            self.call(*args, '--json', self.path('second.json'))
        first = Path(self.path('first.json')).read_bytes()
        self.assertEqual(first, Path(self.path('second.json')).read_bytes())

    def test_compare_all_pairs_and_one_pair(self):
        self.call('compare', self.dataset, '--boot', '100', '--json', self.path('all.json'), '--csv', self.path('all.csv'))
        self.assertEqual(len(self.read_json('all.json')['report']['comparisons']), 3)
        self.assertEqual(len(pd.read_csv(self.path('all.csv'))), 3)
        self.call('compare', self.dataset, '--boot', '100', '--pair', 'C,A', '--json', self.path('one.json'))
        comparison, = self.read_json('one.json')['report']['comparisons']
        self.assertEqual((comparison['method_1'], comparison['method_2']), ('C', 'A'))

    def test_rank_outputs(self):
        self.call('rank', self.dataset, '--boot', '100', '--csv', self.path('rank.csv'), '--svg', self.path('rank.svg'))
        frame = pd.read_csv(self.path('rank.csv'))
        self.assertEqual(list(frame.columns), ['Method', 'rank_1', 'rank_2', 'rank_3'])
        np.testing.assert_allclose(frame[['rank_1', 'rank_2', 'rank_3']].sum(axis=1), 1.0)
        self.assertEqual(glyph_count(Path(self.path('rank.svg')).read_text(encoding='utf-8')), 9)

    def test_rank_by_msip(self):
        self.call('rank', self.dataset, '--boot', '100', '--stat', 'msip', '--json', self.path('rank.json'))
        ranking = self.read_json('rank.json')['report']['ranking']
        self.assertEqual(ranking['orientation'], 'higher')

    def test_corr_outputs(self):
        self.call('corr', self.dataset, '--on', 'values', '--with-reference', '--svg', self.path('corr.svg'),
                  '--json', self.path('corr.json'))
        self.assertEqual(self.read_json('corr.json')['report']['correlation']['labels'], ['Ref', 'A', 'B', 'C'])
        self.assertEqual(glyph_count(Path(self.path('corr.svg')).read_text(encoding='utf-8')), 16)

    def test_sip_outputs(self):
        self.call('sip', self.dataset, '--boot', '100', '--pair', 'A,B', '--ecdf', self.path('ecdf.svg'),
                  '--svg', self.path('sip.svg'), '--json', self.path('sip.json'))
        document = self.read_json('sip.json')
        self.assertIn('delta_ecdf', document['report'])
        self.assertEqual(document['report']['sip']['labels'], ['A', 'B', 'C'])
        self.assertTrue(Path(self.path('ecdf.svg')).read_text(encoding='utf-8').startswith('<?xml'))
        self.assertEqual(glyph_count(Path(self.path('sip.svg')).read_text(encoding='utf-8')), 9)

    def test_weighted_statistics(self):
        dataset = str(write_benchmark(self.dir / 'unc.csv', uncertainty=True))
        self.call('stats', dataset, '--boot', '100', '--weighted', '--csv', self.path('w.csv'))
        self.assertIn('cochran_mean', pd.read_csv(self.path('w.csv')).columns)
        with self.assertRaises(CommandError) as ctx:
            self.call('stats', self.dataset, '--boot', '100', '--weighted')
        self.assertEqual(ctx.exception.returncode, 2)

    def test_weighted_statistics_with_a_deterministic_method(self):
        rng = np.random.default_rng(5)
        ref = rng.uniform(0.0, 10.0, 40)
        a = ref + rng.normal(0.0, 0.5, 40)
        b = ref + rng.normal(0.2, 0.8, 40)
        lines = ['System,Ref,A,u:A,B'] + [
            f"s{i + 1},{ref[i]:.6f},{a[i]:.6f},0.2,{b[i]:.6f}" for i in range(40)
        ]
        dataset = self.dir / 'partial.csv'
        dataset.write_text('\n'.join(lines) + '\n', encoding='utf-8')
        with self.assertLogs('reports.management.commands.stats', level='WARNING') as logs:
            self.call('stats', str(dataset), '--boot', '100', '--weighted', '--json', self.path('w.json'))
        self.assertIn('No weighted mean for B', logs.output[0])
        a_entry, b_entry = self.read_json('w.json')['report']['methods']
        self.assertIsNotNone(a_entry['weighted'])
        self.assertAlmostEqual(a_entry['weighted']['uncertainty'], 0.2 / np.sqrt(40), places=10)
        self.assertIsNone(b_entry['weighted'])
        self.assertIsNotNone(b_entry['cochran']['mean'])
        # Zero uncertainties leave the whole spread to the model variance.
        self.assertAlmostEqual(b_entry['cochran']['mean'], float(np.mean(ref - b)), places=5)

    def test_simulated_benchmark_feeds_the_other_commands(self):
        self.call('simulate', 'gh', '--n', '30', '--rho', '0.5', '--scenarios', 'heavy', '--seed', '1',
                  '--csv', self.path('gh.csv'))
        frame = pd.read_csv(self.path('gh.csv'))
        self.assertEqual(list(frame.columns), ['System', 'Ref', 'M1', 'M2'])
        self.assertEqual(len(frame), 30)
        self.call('stats', self.path('gh.csv'), '--boot', '100')

    def test_small_study_report(self):
        self.call('simulate', 'type1', '--n', '10', '--reps', '100', '--boot', '100', '--stat', 'mue',
                  '--json', self.path('t1.json'), '--csv', self.path('t1.csv'))
        document = self.read_json('t1.json')
        self.assertEqual(document['config']['study'], 'type1')
        row, = document['report']['rows']
        self.assertEqual(row['statistic'], 'MUE')

    def test_invalid_options(self):
        with self.assertRaises(CommandError) as ctx:
            self.call('stats', self.dataset, '--boot', '50')
        self.assertEqual(ctx.exception.returncode, 2)
        with self.assertRaises(CommandError) as ctx:
            self.call('stats', self.dataset, '--svg', self.path('nope.svg'))
        self.assertEqual(ctx.exception.returncode, 2)


class CliTests(SimpleTestCase):

    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.addCleanup(self.tmp.cleanup)
        self.dataset = str(write_benchmark(Path(self.tmp.name) / 'bench.csv'))

    def run_quietly(self, *argv):
        with captured_stdout() as stdout, captured_stderr() as stderr:
            code = run(list(argv))
        return code, stdout.getvalue(), stderr.getvalue()

    def test_success(self):
        code, stdout, _ = self.run_quietly('stats', self.dataset, '--boot', '100')
        self.assertEqual(code, 0)
        self.assertIn('MUE', stdout)

    def test_invalid_input(self):
        self.assertEqual(self.run_quietly('stats', str(Path(self.tmp.name) / 'missing.csv'))[0], 2)
        self.assertEqual(self.run_quietly('compare', self.dataset, '--boot', '100', '--pair', 'A,Z')[0], 2)
        self.assertEqual(self.run_quietly('stats', self.dataset, '--bogus')[0], 2)
        self.assertEqual(self.run_quietly('simulate', 'gh')[0], 2)

    def test_usage(self):
        self.assertEqual(self.run_quietly()[0], 2)
        self.assertEqual(self.run_quietly('--help')[0], 0)
        code, _, stderr = self.run_quietly('frobnicate')
        self.assertEqual(code, 2)
        self.assertIn("unknown subcommand", stderr)

    def test_internal_error(self):
        with mock.patch('reports.management.commands.stats.bootstrap_se', side_effect=RuntimeError('boom')):
            code, _, stderr = self.run_quietly('stats', self.dataset, '--boot', '100')
        self.assertEqual(code, 1)
        self.assertIn('internal error', stderr)
