from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .presentation import TrianglePresentation, is_torsion_free, shift

CHI_STATUSES = ['match', 'mismatch', 'not applicable']


@dataclass(frozen=True)
class CellIndex:
    """Dense numbering of the directed 2-cells, which are the triples in lexicographic order

    Attributes
    ----------
    cells : tuple
        cells[idx] is the triple (a0, a1, a2)
    index : dict
        Inverse lookup from triple to position
    shift : np.ndarray
        shift[idx] is the position of (a1, a2, a0)
    shift2 : np.ndarray
        shift2[idx] is the position of (a2, a0, a1)
    columns : np.ndarray
        size x 3 array of the cell entries, for vectorised lookups

    """
    cells: tuple
    index: dict = field(init=False, repr=False, compare=False)
    shift: np.ndarray = field(init=False, repr=False, compare=False)
    shift2: np.ndarray = field(init=False, repr=False, compare=False)
    columns: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        index = {t: idx for idx, t in enumerate(self.cells)}
        shifted = np.array([index[shift(t)] for t in self.cells], dtype=np.int64)
        columns = np.array(self.cells, dtype=np.int64).reshape(-1, 3)
        for arr in (shifted, columns):
            arr.setflags(write=False)
        object.__setattr__(self, 'index', index)
        object.__setattr__(self, 'shift', shifted)
        object.__setattr__(self, 'shift2', shifted[shifted])
        object.__setattr__(self, 'columns', columns)

    def __len__(self) -> int:
        return len(self.cells)

    def position(self, triple: tuple) -> int:
        return self.index[tuple(triple)]

    def unit(self, triple: tuple) -> np.ndarray:
        """Cell vector with a single 1 at 'triple'"""
        vec = np.zeros(len(self.cells), dtype=np.int64)
        vec[self.position(triple)] = 1
        return vec


@lru_cache(maxsize=32)
def cell_index(tp: TrianglePresentation) -> CellIndex:
    return CellIndex(tp.triples)


def cyclic_orbits(tp: TrianglePresentation) -> list:
    """Partition the cells into orbits of the cyclic shift, each orbit listed from its least triple"""
    orbits = []
    seen = set()
    for t in tp.triples:
        if t in seen:
            continue
        orbit = [t]
        nxt = shift(t)
        while nxt != t:
            orbit.append(nxt)
            nxt = shift(nxt)
        seen.update(orbit)
        orbits.append(tuple(orbit))
    return orbits


def edge_sum(tp: TrianglePresentation, point: int) -> np.ndarray:
    """0/1 cell vector of the cells with a2 = point"""
    return (cell_index(tp).columns[:, 2] == point).astype(np.int64)


def inverse_edge_sum(tp: TrianglePresentation, point: int) -> np.ndarray:
    """0/1 cell vector of the cells with a1 = point"""
    return (cell_index(tp).columns[:, 1] == point).astype(np.int64)


def epsilon(tp: TrianglePresentation) -> np.ndarray:
    return np.ones(len(tp.triples), dtype=np.int64)


@dataclass(frozen=True)
class EulerCharacteristic:
    chi: int
    formula: int
    status: str

    def __post_init__(self):
        if self.status not in CHI_STATUSES:
            raise ValueError(f"chi status '{self.status}' not one of {CHI_STATUSES}")

    @property
    def matches(self) -> bool:
        return self.status == 'match'


def chi_formula(q: int):
    """(q-1)(q^2-1)/3 as an integer, or None when it is not integral"""
    num = (q - 1) * (q * q - 1)
    return num // 3 if num % 3 == 0 else None


def euler_characteristic(tp: TrianglePresentation) -> EulerCharacteristic:
    """Euler characteristic from orbit counts: one vertex, |P| edges and one face per cyclic orbit

    The comparison with (q-1)(q^2-1)/3 is only made for torsion free presentations.
    """
    q = tp.order
    chi = 1 - tp.plane.size + len(cyclic_orbits(tp))
    formula = chi_formula(q)
    if not is_torsion_free(tp):
        status = 'not applicable'
    else:
        status = 'match' if chi == formula else 'mismatch'
    return EulerCharacteristic(chi=chi, formula=formula, status=status)
