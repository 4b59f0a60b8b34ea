"""
Command line entry points and exit codes.
"""
from contextlib import redirect_stdout, redirect_stderr
from io import StringIO
import json
import tempfile
from pathlib import Path
from unittest import TestCase
from unittest.mock import patch

from fixtures import tiny_doc
from rhcplan import import_nba
from rhcplan.cli import main, build_parser


def run(*argv):
    out, err = StringIO(), StringIO()
    with redirect_stdout(out), redirect_stderr(err):
        code = main(list(argv))
    return code, out.getvalue(), err.getvalue()


class CliCase(TestCase):

    def setUp(self):
        self._tmp = tempfile.TemporaryDirectory()
        self.tmp = Path(self._tmp.name)

    def tearDown(self):
        self._tmp.cleanup()

    def scenario(self, **changes):
        path = self.tmp / 'tiny.json'
        path.write_text(json.dumps(tiny_doc(**changes)), encoding='utf-8')
        return str(path)


class TestTranslate(CliCase):

    def test_stdout(self):
        code, out, _ = run('translate', '[]<> a', '--atoms', 'a,b')
        self.assertEqual(code, 0)
        doc = json.loads(out)
        self.assertEqual(doc['atoms'], ['a', 'b'])
        self.assertTrue(doc['accepting'])

    def test_file(self):
        path = self.tmp / 'hard.json'
        code, out, _ = run('translate', '[]!Obstacle', '-o', str(path))
        self.assertEqual(code, 0)
        self.assertIn('states\t1', out)
        self.assertEqual(import_nba(path).n_states, 1)

    def test_syntax_error(self):
        code, out, err = run('translate', 'a &&')
        self.assertEqual(code, 2)
        self.assertEqual(out, '')
        self.assertIn('rhcplan: ', err)


class TestScenarioCommands(CliCase):

    def test_build(self):
        code, out, _ = run('-q', 'build', self.scenario(), '-o', str(self.tmp / 'b'))
        self.assertEqual(code, 0)
        self.assertTrue((self.tmp / 'b/product.tsv').exists())
        self.assertTrue((self.tmp / 'b/energy_table.csv').exists())
        self.assertIn('S_P', out)

    def test_plan_and_render(self):
        out_dir = self.tmp / 'run'
        code, out, _ = run('plan', self.scenario(), '--steps', '5', '--audit', '-o', str(out_dir))
        self.assertEqual(code, 0)
        self.assertIn('tiny', out)
        self.assertGreater((out_dir / 'mission.log').stat().st_size, 0)
        again = self.tmp / 'again'
        code, _, _ = run('render', str(out_dir), '-o', str(again))
        self.assertEqual(code, 0)
        self.assertGreater((again / 'mission.log').stat().st_size, 0)
        self.assertGreater((again / 'summary.html').stat().st_size, 0)

    def test_imported_automaton(self):
        hard = self.tmp / 'hard.json'
        run('translate', '[]!Obstacle', '-o', str(hard))
        code, _, _ = run('plan', self.scenario(), '--hard-nba', str(hard), '--steps', '2',
                         '-o', str(self.tmp / 'run'))
        self.assertEqual(code, 0)
        bad = self.tmp / 'bad.json'
        bad.write_text('{"atoms": []}', encoding='utf-8')
        code, _, err = run('plan', self.scenario(), '--soft-nba', str(bad), '-o', str(self.tmp / 'run'))
        self.assertEqual(code, 2)
        self.assertIn('Missing field', err)

    def test_bad_scenario(self):
        code, _, err = run('plan', self.scenario(version=9), '-o', str(self.tmp / 'run'))
        self.assertEqual(code, 2)
        self.assertIn('version', err)
        code, _, _ = run('plan', str(self.tmp / 'missing.json'))
        self.assertEqual(code, 2)

    def test_no_feasible_start(self):
        code, _, err = run('plan', self.scenario(soft='false'), '-o', str(self.tmp / 'run'))
        self.assertEqual(code, 3)
        self.assertIn('no accepting run', err)

    def test_unwritable(self):
        blocker = self.tmp / 'file'
        blocker.write_text('x', encoding='utf-8')
        code, _, err = run('build', self.scenario(), '-o', str(blocker / 'out'))
        self.assertEqual(code, 5)
        self.assertIn('cannot write', err)


class TestBench(CliCase):

    def test_memory_guard(self):
        with patch('rhcplan.simulation.available_memory', return_value=0):
            code, out, _ = run('bench', '--rows', '4x2', '--steps', '2', '-o', str(self.tmp / 'bench.csv'))
        self.assertEqual(code, 4)
        self.assertTrue((self.tmp / 'bench.csv').exists())

    def test_rows(self):
        args = build_parser().parse_args(['bench', '--rows', '10x4,30X8'])
        self.assertEqual(args.rows, [(10, 4), (30, 8)])
        with redirect_stderr(StringIO()):
            with self.assertRaises(SystemExit):
                build_parser().parse_args(['bench', '--rows', '10by4'])
