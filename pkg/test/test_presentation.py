import threading
import unittest

from src.plane import ParseError, difference_set_plane, make_plane
from src.presentation import (
    PointLineCorrespondence, SearchInterrupted, TrianglePresentation, ValidationError, cyclic_presentation,
    emit_presentation, is_torsion_free, parse_correspondence, parse_presentation, search, verify
)


def fano_triples() -> list:
    triples = []
    for i in range(7):
        triples.append((i, (i + 1) % 7, (i + 3) % 7))
        triples.append((i, (i + 2) % 7, (i + 6) % 7))
        triples.append((i, (i + 4) % 7, (i + 5) % 7))
    return triples


def fano_presentation(triples: list = None) -> TrianglePresentation:
    plane = difference_set_plane(2)
    lam = PointLineCorrespondence.identity(plane)
    return TrianglePresentation(plane, lam, tuple(fano_triples() if triples is None else triples))


def fano_text(triples: list = None) -> str:
    rows = ['q 2', 'plane canonical-difference-set']
    rows += [f'lambda {i} {i}' for i in range(7)]
    rows += [f'triple {i} {j} {k}' for i, j, k in (fano_triples() if triples is None else triples)]
    return '\n'.join(rows) + '\n'


class TestCorrespondence(unittest.TestCase):
    def test_identity(self):
        lam = PointLineCorrespondence.identity(difference_set_plane(2))
        self.assertEqual(lam.line_of(3), 3)
        self.assertEqual(lam.point_of(5), 5)

    def test_not_bijection(self):
        with self.assertRaises(ValueError):
            PointLineCorrespondence(difference_set_plane(2), (0, 0, 1, 2, 3, 4, 5))

    def test_inverse(self):
        lam = PointLineCorrespondence(difference_set_plane(2), (6, 5, 4, 3, 2, 1, 0))
        self.assertEqual(lam.point_of(6), 0)

    def test_parse_correspondence(self):
        plane = difference_set_plane(2)
        text = ''.join(f'lambda {i} {(i + 1) % 7}\n' for i in range(7))
        self.assertEqual(parse_correspondence(text, plane).line_of(6), 0)
        with self.assertRaises(ParseError):
            parse_correspondence('lambda 0 0\n', plane)
        with self.assertRaises(ParseError):
            parse_correspondence('triple 0 1 3\n', plane)


class TestVerify(unittest.TestCase):
    def test_valid(self):
        tp = fano_presentation()
        report = verify(tp)
        self.assertTrue(report.valid)
        self.assertEqual(report.size, 21)
        self.assertEqual(report.lines(), ['valid: |T|=21'])

    def test_triples_sorted(self):
        tp = fano_presentation()
        self.assertEqual(list(tp.triples), sorted(fano_triples()))
        self.assertEqual(tp.triples[0], (0, 1, 3))

    def test_removed_triple(self):
        triples = [t for t in fano_triples() if t != (0, 1, 3)]
        report = verify(fano_presentation(triples))
        self.assertFalse(report.valid)
        self.assertIn('ii', report.axioms())
        self.assertIn('i', report.axioms())
        uncovered = [v for v in report.violations if v.axiom == 'i' and v.witness == (0, 1)]
        self.assertEqual(len(uncovered), 1)
        broken = [v.witness for v in report.violations if v.axiom == 'ii']
        self.assertIn((3, 0, 1), broken)
        self.assertIn((1, 3, 0), broken)
        self.assertEqual(len(broken), 2)

    def test_extra_extension(self):
        extra = [(0, 1, 5), (1, 5, 0), (5, 0, 1)]
        report = verify(fano_presentation(fano_triples() + extra))
        self.assertFalse(report.valid)
        self.assertIn((0, 1), [v.witness for v in report.violations if v.axiom == 'iii'])

    def test_disallowed_pair(self):
        report = verify(fano_presentation(fano_triples() + [(0, 5, 0)]))
        self.assertIn((0, 5, 0), [v.witness for v in report.violations if v.axiom == 'i'])

    def test_duplicate(self):
        report = verify(fano_presentation(fano_triples() + [(0, 1, 3)]))
        self.assertFalse(report.valid)

    def test_orbit_count(self):
        for q in (2, 3, 5):
            tp = cyclic_presentation(q)
            singles = sum(1 for i, j, k in tp.triples if i == j == k)
            self.assertEqual(len(tp.triples), (q + 1) * (q * q + q + 1))
            self.assertEqual(singles % 3, len(tp.triples) % 3)


class TestTorsion(unittest.TestCase):
    def test_fano(self):
        self.assertTrue(is_torsion_free(fano_presentation()))

    def test_singleton(self):
        tp = fano_presentation(fano_triples() + [(2, 2, 2)])
        self.assertFalse(is_torsion_free(tp))

    def test_order_three(self):
        tp = cyclic_presentation(3)
        self.assertTrue(verify(tp).valid)
        self.assertFalse(is_torsion_free(tp))
        self.assertIn((0, 0, 0), tp.triples)


class TestCyclicPresentation(unittest.TestCase):
    def test_fano_family(self):
        self.assertEqual(cyclic_presentation(2), fano_presentation())

    def test_order_five(self):
        tp = cyclic_presentation(5)
        self.assertEqual(len(tp.triples), 186)
        self.assertTrue(is_torsion_free(tp))
        self.assertIn((0, 1, 6), tp.triples)
        self.assertIn((0, 11, 4), tp.triples)

    def test_torsion_free_only(self):
        self.assertIsNone(cyclic_presentation(3, torsion_free_only=True))
        self.assertIsNotNone(cyclic_presentation(5, torsion_free_only=True))


class TestParse(unittest.TestCase):
    def test_valid(self):
        tp = parse_presentation(fano_text())
        self.assertEqual(tp, fano_presentation())

    def test_missing_row(self):
        with self.assertRaises(ValidationError) as cm:
            parse_presentation(fano_text(fano_triples()[:-1]))
        self.assertIn('i', cm.exception.report.axioms())

    def test_disallowed_triple(self):
        with self.assertRaises(ValidationError) as cm:
            parse_presentation(fano_text(fano_triples() + [(0, 5, 0)]))
        self.assertIn('i', cm.exception.report.axioms())

    def test_out_of_range(self):
        with self.assertRaises(ParseError) as cm:
            parse_presentation(fano_text(fano_triples() + [(0, 1, 7)]))
        self.assertEqual(cm.exception.lineno, 31)

    def test_malformed(self):
        for text in ('lambda 0 0\n', 'q two\n', 'q 2\nfoo 1\n', 'q 2\ntriple 0 1\n', 'q 2\nplane weird\n'):
            with self.assertRaises(ParseError):
                parse_presentation(text)

    def test_missing_lambda(self):
        text = fano_text().replace('lambda 6 6\n', '')
        with self.assertRaises(ParseError):
            parse_presentation(text)

    def test_round_trip(self):
        for tp in (fano_presentation(), cyclic_presentation(3)):
            text = emit_presentation(tp)
            self.assertTrue(text.endswith(f'# count={len(tp.triples)}\n'))
            self.assertEqual(parse_presentation(text), tp)

    def test_inline_round_trip(self):
        plane = make_plane(2)
        inline = fano_presentation()
        text = emit_presentation(inline).replace('plane canonical-difference-set', 'plane inline\n' + '\n'.join(
            f"line {i} {' '.join(str(p) for p in pts)}" for i, pts in enumerate(inline.plane.lines)
        ))
        tp = parse_presentation(text)
        self.assertEqual(tp.plane.source, 'inline')
        self.assertEqual(parse_presentation(emit_presentation(tp)), tp)
        self.assertNotEqual(tp.plane, plane)


class TestSearch(unittest.TestCase):
    def setUp(self):
        self.plane = difference_set_plane(2)
        self.lam = PointLineCorrespondence.identity(self.plane)

    def test_limit_one(self):
        found = list(search(self.plane, self.lam, limit=1))
        self.assertEqual(len(found), 1)
        self.assertTrue(verify(found[0]).valid)

    def test_limit_zero(self):
        self.assertEqual(list(search(self.plane, self.lam, limit=0)), [])

    def test_negative_limit(self):
        with self.assertRaises(ValueError):
            list(search(self.plane, self.lam, limit=-1))

    def test_exhaustive_deterministic(self):
        first = list(search(self.plane, self.lam))
        second = list(search(self.plane, self.lam))
        self.assertEqual(first, second)
        self.assertIn(fano_presentation(), first)
        self.assertEqual([tp.triples for tp in first], sorted(tp.triples for tp in first))
        for tp in first:
            self.assertTrue(verify(tp).valid)

    def test_torsion_free_only(self):
        for tp in search(self.plane, self.lam, torsion_free_only=True):
            self.assertTrue(is_torsion_free(tp))

    def test_lambda_required(self):
        with self.assertRaises(ValueError):
            list(search(difference_set_plane(3), None, limit=1))

    def test_all_lambdas(self):
        found = list(search(self.plane, None, limit=3))
        self.assertEqual(len(found), 3)
        for tp in found:
            self.assertTrue(verify(tp).valid)

    def test_cancel(self):
        cancel = threading.Event()
        cancel.set()
        with self.assertRaises(SearchInterrupted) as cm:
            list(search(self.plane, self.lam, cancel=cancel))
        self.assertEqual(cm.exception.emitted, 0)

    def test_order_three(self):
        plane = difference_set_plane(3)
        found = list(search(plane, PointLineCorrespondence.identity(plane), limit=1))
        self.assertEqual(len(found), 1)
        self.assertFalse(is_torsion_free(found[0]))


if __name__ == '__main__':
    unittest.main()
