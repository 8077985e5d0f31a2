from dataclasses import dataclass, field
import itertools
import logging
import threading

import numpy as np

from . import NL, CONFIG_DEFAULTS
from .plane import (
    DIFFERENCE_SETS, ParseError, ProjectivePlane, difference_set_plane, emit_line_rows, int_args,
    lines_from_records, make_plane, plane_from_incidence, read_records
)

TORSION_CRITERION = 'no-ξ³-relator'


class ValidationError(ValueError):
    """Raised when a presentation fails one of the triangle presentation axioms

    Attributes
    ----------
    report : ValidationReport
        Full list of violations found

    """
    def __init__(self, report):
        self.report = report
        first = report.violations[0] if report.violations else None
        super().__init__(f'invalid presentation: {first}' if first else 'invalid presentation')


class SearchInterrupted(RuntimeError):
    """Raised when a search is cancelled; 'emitted' presentations were already produced and are valid"""
    def __init__(self, emitted: int):
        self.emitted = emitted
        super().__init__(f'search cancelled after {emitted} presentations')


@dataclass(frozen=True)
class PointLineCorrespondence:
    """A bijection from points to lines, written xi -> lambda(xi)

    Attributes
    ----------
    plane : ProjectivePlane
        The plane both sides refer to
    mapping : tuple
        mapping[point] is the line assigned to the point
    inverse : tuple
        inverse[line] is the point mapped onto the line

    """
    plane: ProjectivePlane
    mapping: tuple
    inverse: tuple = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        n = self.plane.size
        mapping = tuple(int(x) for x in self.mapping)
        if len(mapping) != n or sorted(mapping) != list(range(n)):
            raise ValueError(f'lambda is not a bijection onto the {n} lines')
        inverse = [0] * n
        for pt, ln in enumerate(mapping):
            inverse[ln] = pt
        object.__setattr__(self, 'mapping', mapping)
        object.__setattr__(self, 'inverse', tuple(inverse))

    @classmethod
    def identity(cls, plane: ProjectivePlane) -> 'PointLineCorrespondence':
        return cls(plane, tuple(range(plane.size)))

    def line_of(self, point: int) -> int:
        return self.mapping[point]

    def point_of(self, line: int) -> int:
        return self.inverse[line]

    def as_array(self) -> np.ndarray:
        return np.array(self.mapping, dtype=np.int64)


@dataclass(frozen=True)
class TrianglePresentation:
    """Plane, correspondence and the triple set T, with triples held in lexicographic order"""
    plane: ProjectivePlane
    correspondence: PointLineCorrespondence
    triples: tuple

    def __post_init__(self):
        triples = tuple(sorted(tuple(int(x) for x in t) for t in self.triples))
        object.__setattr__(self, 'triples', triples)

    @property
    def order(self) -> int:
        return self.plane.order

    @property
    def expected_size(self) -> int:
        q = self.plane.order
        return (q + 1) * (q * q + q + 1)

    def __len__(self) -> int:
        return len(self.triples)


@dataclass(frozen=True)
class Violation:
    axiom: str
    message: str
    witness: tuple = ()

    def __str__(self):
        return f'axiom ({self.axiom}): {self.message} {self.witness}'


@dataclass
class ValidationReport:
    size: int
    expected: int
    violations: list = field(default_factory=list)

    @property
    def valid(self) -> bool:
        return not self.violations

    def axioms(self) -> set:
        return {v.axiom for v in self.violations}

    def lines(self) -> list:
        if self.valid:
            return [f'valid: |T|={self.size}']
        return [f'invalid: {len(self.violations)} violations'] + [str(v) for v in self.violations]


def shift(triple: tuple) -> tuple:
    return (triple[1], triple[2], triple[0])


def verify(tp: TrianglePresentation) -> ValidationReport:
    """Check the triangle presentation axioms exhaustively

    Axiom (i): a pair (i, j) extends to a triple iff j is incident to lambda(i).
    Axiom (ii): the triple set is closed under cyclic shift.
    Axiom (iii): each pair extends to at most one third point.

    Parameters
    ----------
    tp : TrianglePresentation
        Presentation to check

    Returns
    -------
    ValidationReport : Every violation found, with witnesses. Violations are never raised.

    """
    plane = tp.plane
    lam = tp.correspondence
    n = plane.size
    report = ValidationReport(size=len(tp.triples), expected=tp.expected_size)

    in_range = []
    for t in tp.triples:
        if all(0 <= x < n for x in t):
            in_range.append(t)
        else:
            report.violations.append(Violation('index', f'point index out of range 0..{n - 1}', t))

    seen = set()
    extensions = {}
    for t in in_range:
        if t in seen:
            report.violations.append(Violation('iii', 'triple listed twice', t))
            continue
        seen.add(t)
        extensions.setdefault(t[:2], []).append(t[2])

    for t in sorted(seen):
        i, j, _ = t
        if not plane.incident(j, lam.line_of(i)):
            report.violations.append(Violation('i', f'{j} is not incident to lambda({i})', t))

    for i in range(n):
        for j in plane.lines[lam.line_of(i)]:
            if (i, j) not in extensions:
                report.violations.append(Violation('i', 'allowed pair has no extension', (i, j)))

    for t in sorted(seen):
        if shift(t) not in seen:
            report.violations.append(Violation('ii', f'cyclic shift {shift(t)} missing', t))
        if shift(shift(t)) not in seen:
            report.violations.append(Violation('ii', f'inverse shift {shift(shift(t))} missing', t))

    for pair, ks in sorted(extensions.items()):
        if len(ks) > 1:
            report.violations.append(Violation('iii', f'pair extends to {sorted(ks)}', pair))

    if report.valid and report.size != report.expected:
        report.violations.append(Violation('count', f'|T| = {report.size} != {report.expected}', ()))

    return report


def validate(tp: TrianglePresentation) -> TrianglePresentation:
    """Return 'tp' unchanged, or raise ValidationError"""
    report = verify(tp)
    if not report.valid:
        raise ValidationError(report)
    return tp


def is_torsion_free(tp: TrianglePresentation) -> bool:
    """True iff no triple (xi, xi, xi) is present, that is no relator xi^3 = 1"""
    return not any(i == j == k for i, j, k in tp.triples)


def _plane_for(kind: str, q: int, inline_rows: list, lineno: int) -> ProjectivePlane:
    if kind == 'canonical':
        return make_plane(q)
    if kind == 'canonical-difference-set':
        if q not in DIFFERENCE_SETS:
            raise ParseError(f'no difference set plane for order {q}', lineno)
        return difference_set_plane(q)
    if kind == 'inline':
        return plane_from_incidence(lines_from_records(inline_rows, q))
    raise ParseError(f"unknown plane kind '{kind}'", lineno)


def _correspondence_from_rows(plane: ProjectivePlane, rows: list) -> PointLineCorrespondence:
    n = plane.size
    mapping = {}
    for lineno, args in rows:
        pt, ln = int_args(args, lineno, 2)
        if not (0 <= pt < n and 0 <= ln < n):
            raise ParseError(f'index out of range 0..{n - 1}', lineno)
        if pt in mapping:
            raise ParseError(f'lambda assigned twice for point {pt}', lineno)
        mapping[pt] = ln
    if len(mapping) != n:
        raise ParseError(f'expected {n} lambda rows, got {len(mapping)}')
    try:
        return PointLineCorrespondence(plane, tuple(mapping[pt] for pt in range(n)))
    except ValueError as e:
        raise ParseError(str(e))


def parse_presentation(text: str) -> TrianglePresentation:
    """Read the presentation file format and return a verified presentation

    Records are 'q <int>', 'plane canonical|canonical-difference-set|inline' (inline is followed by
    'line' rows), exactly n 'lambda <point> <line>' rows and any number of 'triple <i> <j> <k>' rows.
    A missing plane record means 'canonical'.

    Raises
    ------
    ParseError
        If a record is malformed or an index is out of range
    ValidationError
        If the triples violate an axiom

    """
    q = None
    plane_kind, plane_lineno = 'canonical', None
    inline_rows, lambda_rows, triples = [], [], []
    for lineno, key, args in read_records(text):
        if key == 'q':
            if q is not None:
                raise ParseError("duplicate 'q' header", lineno)
            q = int_args(args, lineno, 1)[0]
            if q < 2:
                raise ParseError(f'order must be at least 2, got {q}', lineno)
            continue
        if q is None:
            raise ParseError(f"'{key}' record before 'q' header", lineno)
        if key == 'plane':
            if len(args) != 1:
                raise ParseError('plane record takes one value', lineno)
            plane_kind, plane_lineno = args[0], lineno
        elif key == 'line':
            inline_rows.append((lineno, args))
        elif key == 'lambda':
            lambda_rows.append((lineno, args))
        elif key == 'triple':
            triples.append((lineno, int_args(args, lineno, 3)))
        else:
            raise ParseError(f"unknown record '{key}'", lineno)

    if q is None:
        raise ParseError("missing 'q' header")
    if inline_rows and plane_kind != 'inline':
        raise ParseError("'line' rows need 'plane inline'", inline_rows[0][0])

    plane = _plane_for(plane_kind, q, inline_rows, plane_lineno)
    correspondence = _correspondence_from_rows(plane, lambda_rows)

    n = plane.size
    for lineno, t in triples:
        if any(not 0 <= x < n for x in t):
            raise ParseError(f'index out of range 0..{n - 1}', lineno)

    tp = TrianglePresentation(plane, correspondence, tuple(tuple(t) for _, t in triples))
    return validate(tp)


def parse_correspondence(text: str, plane: ProjectivePlane) -> PointLineCorrespondence:
    """Read a lambda file, made of 'lambda <point> <line>' rows, against 'plane'"""
    rows = []
    for lineno, key, args in read_records(text):
        if key != 'lambda':
            raise ParseError(f"unexpected record '{key}' in lambda file", lineno)
        rows.append((lineno, args))
    return _correspondence_from_rows(plane, rows)


def emit_presentation(tp: TrianglePresentation) -> str:
    rows = [f'q {tp.order}', f'plane {tp.plane.source}']
    if tp.plane.source == 'inline':
        rows.extend(emit_line_rows(tp.plane))
    rows.extend(f'lambda {pt} {ln}' for pt, ln in enumerate(tp.correspondence.mapping))
    rows.extend(f'triple {i} {j} {k}' for i, j, k in tp.triples)
    rows.append(f'# count={len(tp.triples)}')
    return NL.join(rows) + NL


def cyclic_presentation(q: int, torsion_free_only: bool = False) -> TrianglePresentation:
    """Find the first presentation invariant under the translation xi -> xi+1 of the difference set plane

    With lambda(i) the i-th translate of the difference set D, a translation-invariant presentation is
    the set of (a, a+x, a+x+y) for a in Z/n, where (x, y, z) runs over rotation-closed solutions of
    x + y + z = 0 mod n in D with every x in D used exactly once as a first entry.

    Parameters
    ----------
    q : int
        Order, one of the tabulated difference set orders
    torsion_free_only : bool, optional (default False)
        Skip the solution (0, 0, 0), which gives triples (xi, xi, xi)

    Returns
    -------
    TrianglePresentation : The verified presentation, or None if none exists

    """
    plane = difference_set_plane(q)
    n = plane.size
    diffs = sorted(DIFFERENCE_SETS[q])
    members = set(diffs)

    def extend(step: dict):
        free = [x for x in diffs if x not in step]
        if not free:
            return dict(step)
        x = free[0]
        for y in diffs:
            z = (-x - y) % n
            if z not in members or (torsion_free_only and x == y == z == 0):
                continue
            cycle = {x: y, y: z, z: x}
            if any(step.get(a, b) != b for a, b in cycle.items()):
                continue
            if x == y == z or len({x, y, z}) == 3:
                result = extend({**step, **cycle})
                if result is not None:
                    return result
        return None

    step = extend({})
    if step is None:
        return None

    triples = [((a, (a + x) % n, (a + x + step[x]) % n)) for a in range(n) for x in diffs]
    tp = TrianglePresentation(plane, PointLineCorrespondence.identity(plane), tuple(triples))
    return validate(tp)


def _candidate_orbits(plane: ProjectivePlane, lam: PointLineCorrespondence, torsion_free_only: bool) -> dict:
    """Map each cyclic orbit of admissible triples, keyed by its least rotation, to the pairs it covers"""
    orbits = {}
    for i in range(plane.size):
        for j in plane.lines[lam.line_of(i)]:
            for k in plane.lines[lam.line_of(j)]:
                if not plane.incident(i, lam.line_of(k)):
                    continue
                if torsion_free_only and i == j == k:
                    continue
                rotations = [(i, j, k), (j, k, i), (k, i, j)]
                key = min(rotations)
                if key not in orbits:
                    orbits[key] = sorted({r[:2]: r for r in rotations}.values())
    return orbits


class _exact_cover:
    """Algorithm X over dict-of-sets, columns are allowed pairs and rows are triple orbits"""
    def __init__(self, plane, lam, torsion_free_only, cancel, progress_every):
        self.rows = _candidate_orbits(plane, lam, torsion_free_only)
        self.columns = {(i, j): set() for i in range(plane.size) for j in plane.lines[lam.line_of(i)]}
        for key, triples in self.rows.items():
            for t in triples:
                self.columns[t[:2]].add(key)
        self.cancel = cancel
        self.progress_every = progress_every
        self.nodes = 0
        self.emitted = 0

    def _candidates(self, pair) -> list:
        # ascending third point keeps emission lexicographic
        return sorted(self.columns[pair], key=lambda key: next(t[2] for t in self.rows[key] if t[:2] == pair))

    def _select(self, key) -> list:
        removed = []
        for t in self.rows[key]:
            for other in self.columns[t[:2]]:
                for t2 in self.rows[other]:
                    if t2[:2] != t[:2]:
                        self.columns[t2[:2]].discard(other)
            removed.append(self.columns.pop(t[:2]))
        return removed

    def _deselect(self, key, removed: list):
        for t in reversed(self.rows[key]):
            self.columns[t[:2]] = removed.pop()
            for other in self.columns[t[:2]]:
                for t2 in self.rows[other]:
                    if t2[:2] != t[:2]:
                        self.columns[t2[:2]].add(other)

    def solve(self, chosen: list):
        if self.cancel is not None and self.cancel.is_set():
            raise SearchInterrupted(self.emitted)
        self.nodes += 1
        if self.progress_every and self.nodes % self.progress_every == 0:
            logging.info(f'search visited {self.nodes} nodes, {self.emitted} presentations so far')

        if not self.columns:
            yield list(chosen)
            return
        if any(not keys for keys in self.columns.values()):
            return

        pair = min(self.columns)
        for key in self._candidates(pair):
            chosen.append(key)
            removed = self._select(key)
            yield from self.solve(chosen)
            self._deselect(key, removed)
            chosen.pop()


def _search_one(plane, lam, torsion_free_only, cancel, progress_every, emitted, limit):
    solver = _exact_cover(plane, lam, torsion_free_only, cancel, progress_every)
    solver.emitted = emitted
    for chosen in solver.solve([]):
        triples = tuple(t for key in chosen for t in solver.rows[key])
        tp = TrianglePresentation(plane, lam, triples)
        report = verify(tp)
        if not report.valid:
            err_msg = f'search produced an invalid presentation: {report.violations[0]}'
            logging.critical(err_msg)
            raise RuntimeError(err_msg)
        solver.emitted += 1
        yield tp
        if limit is not None and solver.emitted >= limit:
            return
    logging.debug(f'exact cover finished after {solver.nodes} nodes')


def search(
        plane: ProjectivePlane,
        correspondence: PointLineCorrespondence = None,
        limit: int = None,
        torsion_free_only: bool = False,
        cancel: threading.Event = None,
        progress_every: int = CONFIG_DEFAULTS['searchProgressEvery']
):
    """Stream the triangle presentations compatible with a correspondence

    Depth-first exact cover: every allowed pair must be covered by exactly one triple and triples
    come in whole cyclic orbits, so every emitted presentation satisfies the three axioms.
    The branching pair is always the least uncovered one and its extensions are tried in
    increasing order, which emits presentations in lexicographic order of their triple lists.

    Parameters
    ----------
    plane : ProjectivePlane
        The plane to search over
    correspondence : PointLineCorrespondence, optional (default None)
        Fixed lambda. If not provided every bijection is enumerated in lexicographic order, which is
        only allowed for order 2
    limit : int, optional (default None)
        Stop after this many presentations, None for exhaustive
    torsion_free_only : bool, optional (default False)
        Never use triples (xi, xi, xi)
    cancel : threading.Event, optional (default None)
        Checked at every search node
    progress_every : int, optional
        Log progress every this many nodes, 0 to disable

    Yields
    ------
    TrianglePresentation : Verified presentations in deterministic order

    Raises
    ------
    ValueError
        If no correspondence is given and the order is not 2, or if 'limit' is negative
    SearchInterrupted
        If 'cancel' is set during the search

    """
    if limit is not None and limit < 0:
        raise ValueError(f'limit must be non-negative, got {limit}')
    if correspondence is None and plane.order != 2:
        raise ValueError(f'lambda must be supplied for order {plane.order}')
    if limit == 0:
        return

    if correspondence is not None:
        lambdas = [correspondence]
    else:
        lambdas = (PointLineCorrespondence(plane, perm) for perm in itertools.permutations(range(plane.size)))

    emitted = 0
    for lam in lambdas:
        for tp in _search_one(plane, lam, torsion_free_only, cancel, progress_every, emitted, limit):
            emitted += 1
            yield tp
        if limit is not None and emitted >= limit:
            break

    logging.info(f'search emitted {emitted} presentations')
