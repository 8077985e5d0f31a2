from dataclasses import dataclass, field
import itertools
import logging

import numpy as np

from . import NL

# monic irreducible x^e + c_(e-1) x^(e-1) + ... + c_0, stored as (c_0, ..., c_(e-1))
IRREDUCIBLE_POLYNOMIALS = {
    4: (1, 1),              # x^2 + x + 1
    8: (1, 1, 0),           # x^3 + x + 1
    9: (1, 0),              # x^2 + 1
    16: (1, 1, 0, 0),       # x^4 + x + 1
    25: (2, 0),             # x^2 + 2
    27: (1, 2, 0),          # x^3 + 2x + 1
    32: (1, 0, 1, 0, 0),    # x^5 + x^2 + 1
    49: (1, 0),             # x^2 + 1
}

# planar (q^2+q+1, q+1, 1) difference sets, one per order
DIFFERENCE_SETS = {
    2: (1, 2, 4),
    3: (0, 1, 3, 9),
    4: (3, 6, 7, 12, 14),
    5: (1, 5, 11, 24, 25, 27),
}

PLANE_SOURCES = ['canonical', 'canonical-difference-set', 'inline']


class NotPrimePower(ValueError):
    pass


class NotAProjectivePlane(ValueError):
    """Raised when an incidence table violates a projective plane axiom

    Attributes
    ----------
    axiom : str
        Short name of the first violated axiom
    witness : tuple
        Indices demonstrating the violation

    """
    def __init__(self, axiom: str, witness: tuple = ()):
        self.axiom = axiom
        self.witness = tuple(witness)
        super().__init__(f'{axiom} violated at {self.witness}' if self.witness else axiom)


class EqualPoints(ValueError):
    pass


class EqualLines(ValueError):
    pass


def prime_power(q: int) -> tuple:
    """Return (p, e) with q = p**e, or None if q is not a prime power"""
    if q < 2:
        return None
    p = next(d for d in itertools.count(2) if q % d == 0)
    e, rest = 0, q
    while rest % p == 0:
        rest //= p
        e += 1
    return (p, e) if rest == 1 else None


def order_from_size(n: int) -> int:
    """Return q >= 2 with n = q^2 + q + 1, or None"""
    if n < 7:
        return None
    q = int(round((-1 + (4 * n - 3) ** 0.5) / 2))
    for cand in (q - 1, q, q + 1):
        if cand >= 2 and cand * cand + cand + 1 == n:
            return cand
    return None


class GaloisField:
    """Finite field of order q as dense addition and multiplication tables

    Elements are the integers 0..q-1, read as base-p digit vectors of polynomial coefficients
    (constant term least significant). Extension fields reduce modulo IRREDUCIBLE_POLYNOMIALS[q].

    Attributes
    ----------
    q : int
        Field order
    p : int
        Characteristic
    e : int
        Extension degree
    add : np.ndarray
        q x q addition table
    mul : np.ndarray
        q x q multiplication table

    """
    def __init__(self, q: int):
        pe = prime_power(q)
        if pe is None:
            raise NotPrimePower(f'{q} is not a prime power')
        self.q = q
        self.p, self.e = pe
        if self.e > 1 and q not in IRREDUCIBLE_POLYNOMIALS:
            raise NotImplementedError(f'no irreducible polynomial tabulated for order {q}')

        digits = [self._digits(x) for x in range(q)]
        self.add = np.zeros((q, q), dtype=np.int64)
        self.mul = np.zeros((q, q), dtype=np.int64)
        for a in range(q):
            for b in range(q):
                self.add[a, b] = self._index([(x + y) % self.p for x, y in zip(digits[a], digits[b])])
                self.mul[a, b] = self._index(self._polymul(digits[a], digits[b]))

    def _digits(self, x: int) -> list:
        coeffs = []
        for _ in range(self.e):
            coeffs.append(x % self.p)
            x //= self.p
        return coeffs

    def _index(self, coeffs: list) -> int:
        index = 0
        for c in reversed(coeffs):
            index = index * self.p + c
        return index

    def _polymul(self, a: list, b: list) -> list:
        prod = [0] * (2 * self.e - 1)
        for i, x in enumerate(a):
            for j, y in enumerate(b):
                prod[i + j] += x * y
        if self.e > 1:
            poly = IRREDUCIBLE_POLYNOMIALS[self.q]
            for k in range(len(prod) - 1, self.e - 1, -1):
                c = prod[k]
                if c:
                    prod[k] = 0
                    for i in range(self.e):
                        prod[k - self.e + i] -= c * poly[i]
        return [c % self.p for c in prod[:self.e]]


@dataclass(frozen=True)
class ProjectivePlane:
    """A validated finite projective plane of order q

    Points and lines are dense indices 0..n-1 with n = q^2+q+1. Equality compares order and lines only.

    Attributes
    ----------
    order : int
        The order q
    lines : tuple
        Line i as the sorted tuple of its q+1 point indices
    source : str
        How the plane was produced, one of PLANE_SOURCES
    incidence : np.ndarray
        Boolean table, incidence[line, point]
    join_table : np.ndarray
        join_table[p, p'] is the line through p and p', -1 on the diagonal
    meet_table : np.ndarray
        meet_table[l, l'] is the common point of l and l', -1 on the diagonal

    """
    order: int
    lines: tuple
    source: str = field(default='inline', compare=False)
    incidence: np.ndarray = field(init=False, repr=False, compare=False)
    join_table: np.ndarray = field(init=False, repr=False, compare=False)
    meet_table: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.source not in PLANE_SOURCES:
            raise ValueError(f"plane source '{self.source}' not one of {PLANE_SOURCES}")

        n = len(self.lines)
        incidence = np.zeros((n, n), dtype=bool)
        for idx, pts in enumerate(self.lines):
            incidence[idx, list(pts)] = True

        join = np.full((n, n), -1, dtype=np.int64)
        for idx, pts in enumerate(self.lines):
            for p, p2 in itertools.permutations(pts, 2):
                join[p, p2] = idx

        meet = np.full((n, n), -1, dtype=np.int64)
        for pt in range(n):
            for ln, ln2 in itertools.permutations(np.flatnonzero(incidence[:, pt]), 2):
                meet[ln, ln2] = pt

        incidence.setflags(write=False)
        join.setflags(write=False)
        meet.setflags(write=False)
        object.__setattr__(self, 'incidence', incidence)
        object.__setattr__(self, 'join_table', join)
        object.__setattr__(self, 'meet_table', meet)

    @property
    def size(self) -> int:
        return len(self.lines)

    def incident(self, point: int, line: int) -> bool:
        return bool(self.incidence[line, point])

    def join(self, p: int, p2: int) -> int:
        """Return the unique line through two distinct points

        Raises
        ------
        EqualPoints
            If 'p' and 'p2' are the same point

        """
        if p == p2:
            raise EqualPoints(f'join of point {p} with itself is undefined')
        return int(self.join_table[p, p2])

    def meet(self, l: int, l2: int) -> int:
        """Return the unique point on two distinct lines

        Raises
        ------
        EqualLines
            If 'l' and 'l2' are the same line

        """
        if l == l2:
            raise EqualLines(f'meet of line {l} with itself is undefined')
        return int(self.meet_table[l, l2])

    def lines_through(self, point: int) -> list:
        return [int(x) for x in np.flatnonzero(self.incidence[:, point])]


def _normalized_coordinates(q: int) -> list:
    """Nonzero triples over range(q) whose first nonzero coordinate is 1, in lexicographic order"""
    coords = []
    for v in itertools.product(range(q), repeat=3):
        nonzero = [c for c in v if c != 0]
        if nonzero and nonzero[0] == 1:
            coords.append(v)
    return coords


def make_plane(q: int) -> ProjectivePlane:
    """Build the canonical Desarguesian plane PG(2,q)

    Points and lines are both numbered by lexicographic order of normalized homogeneous coordinates,
    and point x lies on line u iff u . x = 0 over GF(q).

    Parameters
    ----------
    q : int
        Order of the plane, a prime power

    Returns
    -------
    ProjectivePlane : The validated plane

    Raises
    ------
    ValueError
        If q < 2
    NotPrimePower
        If q is not a prime power

    """
    if q < 2:
        raise ValueError(f'plane order must be at least 2, got {q}')

    gf = GaloisField(q)
    coords = np.array(_normalized_coordinates(q), dtype=np.int64)

    # dot[l, p] = sum_i u_l[i] * x_p[i] over GF(q)
    terms = [gf.mul[coords[:, None, i], coords[None, :, i]] for i in range(3)]
    dot = gf.add[gf.add[terms[0], terms[1]], terms[2]]
    table = dot == 0

    plane = plane_from_incidence(table)
    logging.debug(f'built PG(2,{q}) with {plane.size} points')
    return ProjectivePlane(order=plane.order, lines=plane.lines, source='canonical')


def difference_set_plane(q: int) -> ProjectivePlane:
    """Build the cyclic plane whose lines are the translates of a planar difference set

    Line i is {(i + d) mod n : d in D}, so lambda(i) = line i is the natural correspondence.

    Raises
    ------
    NotImplementedError
        If no difference set is tabulated for 'q'

    """
    if q not in DIFFERENCE_SETS:
        raise NotImplementedError(f'no difference set tabulated for order {q}')

    n = q * q + q + 1
    diffs = DIFFERENCE_SETS[q]
    table = np.zeros((n, n), dtype=bool)
    for i in range(n):
        table[i, [(i + d) % n for d in diffs]] = True

    plane = plane_from_incidence(table)
    return ProjectivePlane(order=plane.order, lines=plane.lines, source='canonical-difference-set')


def plane_from_incidence(table) -> ProjectivePlane:
    """Validate an incidence table and return it as a projective plane

    Parameters
    ----------
    table : array-like
        Square boolean table, table[line, point]

    Returns
    -------
    ProjectivePlane : The validated plane with the order inferred from the size

    Raises
    ------
    NotAProjectivePlane
        With the first violated axiom and witness indices

    """
    inc = np.asarray(table).astype(bool)
    if inc.ndim != 2 or inc.shape[0] != inc.shape[1]:
        raise NotAProjectivePlane('table is not square', inc.shape)

    n = inc.shape[0]
    q = order_from_size(n)
    if q is None:
        raise NotAProjectivePlane(f'size {n} is not q^2+q+1 for any q >= 2', (n,))

    line_sizes = inc.sum(axis=1)
    bad = np.flatnonzero(line_sizes != q + 1)
    if bad.size:
        ln = int(bad[0])
        raise NotAProjectivePlane(f'line size {int(line_sizes[ln])} != {q + 1}', (ln,))

    degrees = inc.sum(axis=0)
    bad = np.flatnonzero(degrees != q + 1)
    if bad.size:
        pt = int(bad[0])
        raise NotAProjectivePlane(f'point degree {int(degrees[pt])} != {q + 1}', (pt,))

    as_int = inc.astype(np.int64)
    common_lines = as_int.T @ as_int
    np.fill_diagonal(common_lines, 1)
    bad = np.argwhere(common_lines != 1)
    if bad.size:
        p, p2 = (int(x) for x in bad[0])
        raise NotAProjectivePlane('two points not on exactly one common line', (p, p2))

    common_points = as_int @ as_int.T
    np.fill_diagonal(common_points, 1)
    bad = np.argwhere(common_points != 1)
    if bad.size:
        ln, ln2 = (int(x) for x in bad[0])
        raise NotAProjectivePlane('two lines not meeting in exactly one point', (ln, ln2))

    lines = tuple(tuple(int(x) for x in np.flatnonzero(inc[i])) for i in range(n))
    return ProjectivePlane(order=q, lines=lines, source='inline')


class ParseError(ValueError):
    """Raised for malformed text input

    Attributes
    ----------
    lineno : int
        1-based line number of the offending record, or None if not tied to a line

    """
    def __init__(self, message: str, lineno: int = None):
        self.lineno = lineno
        super().__init__(f'line {lineno}: {message}' if lineno is not None else message)


def read_records(text: str):
    """Yield (lineno, keyword, arguments) for each non-blank record of a line-oriented text format

    Anything after '#' is a comment. Arguments stay as strings.
    """
    for lineno, raw in enumerate(text.splitlines(), start=1):
        content = raw.split('#', 1)[0].strip()
        if content:
            tokens = content.split()
            yield lineno, tokens[0], tokens[1:]


def int_args(args: list, lineno: int, count: int = None) -> list:
    if count is not None and len(args) != count:
        raise ParseError(f'expected {count} values, got {len(args)}', lineno)
    try:
        return [int(a) for a in args]
    except ValueError:
        raise ParseError(f'non-integer value in {args}', lineno)


def lines_from_records(records: list, q: int) -> tuple:
    """Collect 'line <idx> <p1> ... <p(q+1)>' records into an incidence table"""
    n = q * q + q + 1
    table = np.zeros((n, n), dtype=bool)
    seen = set()
    for lineno, args in records:
        vals = int_args(args, lineno, q + 2)
        idx, pts = vals[0], vals[1:]
        if not 0 <= idx < n or any(not 0 <= p < n for p in pts):
            raise ParseError(f'index out of range 0..{n - 1}', lineno)
        if idx in seen:
            raise ParseError(f'line {idx} listed twice', lineno)
        seen.add(idx)
        table[idx, pts] = True
    if len(seen) != n:
        raise ParseError(f'expected {n} line rows, got {len(seen)}')
    return table


def parse_incidence(text: str) -> ProjectivePlane:
    """Read the incidence text format into a validated plane

    The format is a 'q <int>' header followed by 'line <line-index> <p1> ... <p(q+1)>' rows, 0-based.

    Raises
    ------
    ParseError
        If the text is malformed or an index is out of range
    NotAProjectivePlane
        If the rows do not form a projective plane

    """
    q = None
    rows = []
    for lineno, key, args in read_records(text):
        if key == 'q':
            q = int_args(args, lineno, 1)[0]
            if q < 2:
                raise ParseError(f'order must be at least 2, got {q}', lineno)
        elif key == 'line':
            if q is None:
                raise ParseError("'line' row before 'q' header", lineno)
            rows.append((lineno, args))
        else:
            raise ParseError(f"unknown record '{key}'", lineno)

    if q is None:
        raise ParseError("missing 'q' header")

    return plane_from_incidence(lines_from_records(rows, q))


def emit_line_rows(plane: ProjectivePlane) -> list:
    return [f"line {idx} {' '.join(str(p) for p in pts)}" for idx, pts in enumerate(plane.lines)]


def emit_incidence(plane: ProjectivePlane) -> str:
    rows = [f'# projective plane, {plane.size} points', f'q {plane.order}'] + emit_line_rows(plane)
    return NL.join(rows) + NL
