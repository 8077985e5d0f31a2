from dataclasses import dataclass, field
import logging
import os

import numpy as np

from .cellcomplex import cell_index
from .presentation import TrianglePresentation

MATRIX_KINDS = ['M', 'N']


class TransitionInvariantError(RuntimeError):
    pass


@dataclass(frozen=True)
class TransitionMatrix:
    """0/1 transition matrix on the directed 2-cells, rows and columns in cell order"""
    kind: str
    order: int
    entries: np.ndarray = field(repr=False, compare=False)

    def __post_init__(self):
        if self.kind not in MATRIX_KINDS:
            raise ValueError(f"transition matrix kind '{self.kind}' not one of {MATRIX_KINDS}")

    @property
    def size(self) -> int:
        return self.entries.shape[0]

    def successors(self, row: int) -> list:
        return [int(x) for x in np.flatnonzero(self.entries[row])]


def _checked(kind: str, q: int, table: np.ndarray) -> TransitionMatrix:
    expected = q * q
    for axis, label in ((1, 'row'), (0, 'column')):
        sums = table.sum(axis=axis)
        bad = np.flatnonzero(sums != expected)
        if bad.size:
            idx = int(bad[0])
            err_msg = f'{kind} {label} {idx} sums to {int(sums[idx])}, expected {expected}'
            logging.critical(err_msg)
            raise TransitionInvariantError(err_msg)

    entries = table.astype(np.int64)
    entries.setflags(write=False)
    return TransitionMatrix(kind=kind, order=q, entries=entries)


def matrix_m(tp: TrianglePresentation) -> TransitionMatrix:
    """Build M: m_ab = 1 iff b2 is not on lambda(a2) and lambda(b1) is the join of a0 and b2

    Raises
    ------
    TransitionInvariantError
        If a row or column does not sum to q^2

    """
    cells = cell_index(tp).columns
    a0, a1, a2 = cells[:, 0], cells[:, 1], cells[:, 2]
    lam = tp.correspondence.as_array()
    plane = tp.plane

    off_line = ~plane.incidence[lam[a2][:, None], a2[None, :]]
    same_line = lam[a1][None, :] == plane.join_table[a0[:, None], a2[None, :]]
    return _checked('M', tp.order, off_line & same_line)


def matrix_n(tp: TrianglePresentation) -> TransitionMatrix:
    """Build N: n_ac = 1 iff a1 is not on lambda(c1) and c2 is the meet of lambda(a0) and lambda(c1)

    Raises
    ------
    TransitionInvariantError
        If a row or column does not sum to q^2

    """
    cells = cell_index(tp).columns
    a0, a1, a2 = cells[:, 0], cells[:, 1], cells[:, 2]
    lam = tp.correspondence.as_array()
    plane = tp.plane

    off_line = ~plane.incidence[lam[a1][None, :], a1[:, None]]
    on_meet = a2[None, :] == plane.meet_table[lam[a0][:, None], lam[a1][None, :]]
    return _checked('N', tp.order, off_line & on_meet)


def dump_matrix(tm: TransitionMatrix, path: str) -> str:
    """Write one row per line of space separated 0/1 entries under a '# kind=.. q=.. size=..' header

    Raises
    ------
    FileNotFoundError
        If the directory of 'path' does not exist

    """
    parent = os.path.dirname(path)
    if parent and not os.path.isdir(parent):
        raise FileNotFoundError(f'Path {parent} does not exist!')

    header = f'kind={tm.kind} q={tm.order} size={tm.size}'
    np.savetxt(path, tm.entries, fmt='%d', delimiter=' ', header=header, comments='# ')
    logging.debug(f'wrote {tm.kind} to {path}')
    return path
