import contextlib
import io
import json
import logging
import os
import sys
import tempfile
import unittest

from src import __version__
from src.cli import EXIT_FAIL, EXIT_OK, EXIT_USAGE, RunConfig, UsageError, build_parser, run
from src.fileproc import INDEX_NAME, read_index
from src.ktheory import REPORT_KEYS
from src.presentation import cyclic_presentation, emit_presentation


class CliTestCase(unittest.TestCase):
    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.excepthook = sys.excepthook

    def tearDown(self):
        self.tmp.cleanup()
        sys.excepthook = self.excepthook
        logging.basicConfig(level=logging.WARNING, handlers=[logging.StreamHandler(sys.stderr)], force=True)

    def write(self, name: str, text: str) -> str:
        path = os.path.join(self.tmp.name, name)
        with open(path, 'w', encoding='utf-8') as f:
            f.write(text)
        return path

    def run_cli(self, *argv) -> tuple:
        out, err = io.StringIO(), io.StringIO()
        with contextlib.redirect_stdout(out), contextlib.redirect_stderr(err):
            code = run(list(argv))
        return code, out.getvalue()


class TestVerify(CliTestCase):
    def test_valid(self):
        path = self.write('fano.tp', emit_presentation(cyclic_presentation(2)))
        code, out = self.run_cli('verify', path)
        self.assertEqual(code, EXIT_OK)
        lines = out.splitlines()
        self.assertEqual(lines[0], 'valid: |T|=21')
        self.assertTrue(lines[1].startswith('torsion_free=true'))

    def test_missing_file(self):
        code, out = self.run_cli('verify', os.path.join(self.tmp.name, 'missing.tp'))
        self.assertEqual(code, EXIT_USAGE)
        self.assertEqual(out, '')

    def test_duplicate_extension(self):
        text = emit_presentation(cyclic_presentation(2)) + 'triple 0 1 2\n'
        code, out = self.run_cli('verify', self.write('dup.tp', text))
        self.assertEqual(code, EXIT_FAIL)
        self.assertTrue(out.startswith('invalid:'))
        self.assertIn('axiom (iii)', out)

    def test_parse_error(self):
        code, _ = self.run_cli('verify', self.write('bad.tp', 'q 2\ntriple 0 1\n'))
        self.assertEqual(code, EXIT_USAGE)


class TestKTheory(CliTestCase):
    def test_text(self):
        path = self.write('fano.tp', emit_presentation(cyclic_presentation(2)))
        code, out = self.run_cli('ktheory', path)
        self.assertEqual(code, EXIT_OK)
        self.assertEqual(
            out.splitlines()[-1], 'rank=0 k0_rank=0 harmonic_dim=0 chi=1 beta2=0 theorem=pass'
        )

    def test_json(self):
        path = self.write('fano.tp', emit_presentation(cyclic_presentation(2)))
        code, out = self.run_cli('ktheory', path, '--json')
        self.assertEqual(code, EXIT_OK)
        data = json.loads(out)
        self.assertEqual(list(data), REPORT_KEYS)
        self.assertEqual(data['cells'], 21)
        self.assertEqual(data['theorem'], 'pass')

    def test_torsion_skipped(self):
        path = self.write('q3.tp', emit_presentation(cyclic_presentation(3)))
        code, out = self.run_cli('ktheory', path)
        self.assertEqual(code, EXIT_OK)
        self.assertTrue(out.splitlines()[-1].endswith('beta2=n/a theorem=skipped'))

    def test_dump_matrices(self):
        path = self.write('fano.tp', emit_presentation(cyclic_presentation(2)))
        mats = os.path.join(self.tmp.name, 'mats')
        code, _ = self.run_cli('ktheory', path, '--dump-matrices', mats)
        self.assertEqual(code, EXIT_OK)
        self.assertEqual(sorted(os.listdir(mats)), ['M.txt', 'N.txt'])


class TestSearch(CliTestCase):
    def test_limit_one(self):
        out_dir = os.path.join(self.tmp.name, 'out')
        code, out = self.run_cli('search', '--q', '2', '--limit', '1', '--out', out_dir)
        self.assertEqual(code, EXIT_OK)
        self.assertEqual(out.strip(), 'count=1')
        self.assertTrue(os.path.isfile(os.path.join(out_dir, 'tp_2_0001.tp')))

        with open(os.path.join(out_dir, 'tp_2_0001.tp'), 'r', encoding='utf-8') as f:
            written = f.read()
        code, _ = self.run_cli('verify', self.write('found.tp', written))
        self.assertEqual(code, EXIT_OK)

    def test_limit_zero(self):
        out_dir = os.path.join(self.tmp.name, 'out')
        code, out = self.run_cli('search', '--q', '2', '--limit', '0', '--out', out_dir)
        self.assertEqual(code, EXIT_OK)
        self.assertEqual(out.strip(), 'count=0')
        self.assertEqual(len(read_index(os.path.join(out_dir, INDEX_NAME))), 0)

    def test_exhaustive_reproducible(self):
        contents = []
        for name in ('first', 'second'):
            out_dir = os.path.join(self.tmp.name, name)
            code, out = self.run_cli('search', '--q', '2', '--exhaustive', '--out', out_dir)
            self.assertEqual(code, EXIT_OK)
            files = sorted(os.listdir(out_dir))
            data = {}
            for f in files:
                with open(os.path.join(out_dir, f), 'rb') as fh:
                    data[f] = fh.read()
            contents.append((out, data))
        self.assertEqual(contents[0], contents[1])
        index = read_index(os.path.join(self.tmp.name, 'first', INDEX_NAME))
        self.assertGreater(len(index), 0)

        reports = []
        for f in index['file']:
            path = os.path.join(self.tmp.name, 'first', f)
            first, second = self.run_cli('ktheory', path), self.run_cli('ktheory', path)
            self.assertEqual(first, second)
            self.assertEqual(first[0], EXIT_OK)
            reports.append(first[1])
        for out in reports:
            self.assertTrue(out.splitlines()[-1].endswith('theorem=pass'))

    def test_negative_limit(self):
        code, _ = self.run_cli('search', '--q', '2', '--limit', '-1', '--out', self.tmp.name)
        self.assertEqual(code, EXIT_USAGE)

    def test_needs_limit_or_exhaustive(self):
        code, _ = self.run_cli('search', '--q', '2', '--out', self.tmp.name)
        self.assertEqual(code, EXIT_USAGE)

    def test_all_lambdas_order(self):
        code, _ = self.run_cli('search', '--q', '3', '--all-lambdas', '--limit', '1', '--out', self.tmp.name)
        self.assertEqual(code, EXIT_USAGE)

    def test_not_prime_power(self):
        code, _ = self.run_cli('search', '--q', '6', '--plane', 'canonical', '--limit', '1', '--out', self.tmp.name)
        self.assertEqual(code, EXIT_USAGE)


class TestBetti(CliTestCase):
    def test_values(self):
        self.assertEqual(self.run_cli('betti', '--q', '2'), (EXIT_OK, 'beta2=0 chi=1\n'))
        self.assertEqual(self.run_cli('betti', '--q', '4'), (EXIT_OK, 'beta2=14 chi=15\n'))

    def test_no_group(self):
        code, out = self.run_cli('betti', '--q', '3')
        self.assertEqual(code, EXIT_FAIL)
        self.assertIn('no torsion-free group', out)

    def test_too_small(self):
        self.assertEqual(self.run_cli('betti', '--q', '1')[0], EXIT_USAGE)


class TestPlane(CliTestCase):
    def test_print_and_validate(self):
        code, out = self.run_cli('plane', '--q', '2')
        self.assertEqual(code, EXIT_OK)
        lines = out.splitlines()
        self.assertEqual(lines[1], 'q 2')
        self.assertEqual(len(lines), 2 + 7)

        code, out = self.run_cli('plane', '--file', self.write('fano.txt', out))
        self.assertEqual(code, EXIT_OK)
        self.assertEqual(out.strip(), 'valid: order 2, 7 points')

    def test_difference_set(self):
        code, out = self.run_cli('plane', '--q', '3', '--difference-set')
        self.assertEqual(code, EXIT_OK)
        self.assertEqual(len(out.splitlines()), 2 + 13)

    def test_not_a_plane(self):
        rows = ['q 2'] + [f'line {i} 0 1 2' for i in range(7)]
        code, _ = self.run_cli('plane', '--file', self.write('bad.txt', '\n'.join(rows) + '\n'))
        self.assertIn(code, (EXIT_FAIL, EXIT_USAGE))

    def test_needs_one_source(self):
        self.assertEqual(self.run_cli('plane')[0], EXIT_USAGE)


class TestParser(CliTestCase):
    def test_version(self):
        code, out = self.run_cli('--version')
        self.assertEqual(code, EXIT_OK)
        self.assertIn(__version__, out)

    def test_unknown_command(self):
        self.assertEqual(self.run_cli('frobnicate')[0], EXIT_USAGE)

    def test_config_missing(self):
        code, _ = self.run_cli('--config', os.path.join(self.tmp.name, 'none.json'), 'betti', '--q', '2')
        self.assertEqual(code, EXIT_USAGE)

    def test_run_config(self):
        ns = build_parser().parse_args(['search', '--q', '2', '--exhaustive', '--out', 'x'])
        cfg = RunConfig.from_args(ns)
        self.assertTrue(cfg.exhaustive)
        self.assertIsNone(cfg.limit)
        self.assertEqual(cfg.out_dir, 'x')

        ns = build_parser().parse_args(['search', '--q', '2', '--limit', '1', '--all-lambdas',
                                        '--lambda-file', 'l.txt', '--out', 'x'])
        with self.assertRaises(UsageError):
            RunConfig.from_args(ns)


if __name__ == '__main__':
    unittest.main()
