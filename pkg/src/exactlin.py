""" Exact integer linear algebra: ranks, Hermite and Smith normal forms, lattice membership.

Matrices are 2-d numpy arrays of dtype object holding Python ints, so no entry can overflow.
Only the modular rank check works in int64, with entries reduced below a prime < 2**31.
"""
from dataclasses import dataclass
import logging
import math

import numpy as np

from . import RANK_PRIMES


class InternalRankMismatch(RuntimeError):
    pass


class DimensionMismatch(ValueError):
    pass


_to_int = np.frompyfunc(int, 1, 1)


def as_int_matrix(A, cols: int = None) -> np.ndarray:
    """Copy 'A' into a 2-d object array of Python ints

    Parameters
    ----------
    A : array-like
        Rectangular integer data, a list of rows or a numpy array
    cols : int, optional (default None)
        Column count to use when 'A' has no rows

    Returns
    -------
    np.ndarray : dtype object, shape (rows, cols)

    Raises
    ------
    ValueError
        If 'A' is not rectangular or holds non-integers

    """
    arr = np.array(A, dtype=object)
    if arr.size == 0:
        if arr.ndim == 2:
            return np.empty(arr.shape, dtype=object)
        return np.empty((0, cols or 0), dtype=object)
    if arr.ndim != 2:
        raise ValueError(f'expected a 2-d integer matrix, got shape {arr.shape}')
    for x in arr.flat:
        if not isinstance(x, (int, np.integer)) or isinstance(x, bool):
            raise ValueError(f'non-integer entry {x!r}')
    return _to_int(arr).astype(object)


def as_int_vector(v) -> np.ndarray:
    arr = np.array(v, dtype=object).reshape(-1)
    return _to_int(arr).astype(object) if arr.size else np.empty(0, dtype=object)


def identity(n: int) -> np.ndarray:
    eye = np.zeros((n, n), dtype=object)
    eye[np.arange(n), np.arange(n)] = 1
    return eye


def _bareiss(A: np.ndarray) -> tuple:
    """Fraction-free elimination with column skipping, returning (rank, swap sign, last pivot, max pivot bits)"""
    M = A.copy()
    rows, cols = M.shape
    rank, sign, prev, max_bits = 0, 1, 1, 0
    for c in range(cols):
        if rank == rows:
            break
        nz = np.flatnonzero(M[rank:, c] != 0)
        if nz.size == 0:
            continue
        piv = rank + int(nz[0])
        if piv != rank:
            M[[rank, piv]] = M[[piv, rank]]
            sign = -sign
        p = M[rank, c]
        if rank + 1 < rows:
            # exact by Sylvester's identity
            M[rank + 1:, c + 1:] = (p * M[rank + 1:, c + 1:] - np.outer(M[rank + 1:, c], M[rank, c + 1:])) // prev
            M[rank + 1:, c] = 0
        prev = p
        max_bits = max(max_bits, abs(p).bit_length())
        rank += 1
    return rank, sign, prev, max_bits


def bareiss_rank(A) -> int:
    M = as_int_matrix(A)
    rank, _, _, max_bits = _bareiss(M)
    logging.debug(f'bareiss rank {rank} of {M.shape[0]}x{M.shape[1]}, max pivot bits {max_bits}')
    return rank


def modular_rank(A, p: int) -> int:
    """Rank over GF(p) by Gaussian elimination in int64

    Raises
    ------
    ValueError
        If 'p' is not in 2..2**31-1

    """
    if not 2 <= p < 2 ** 31:
        raise ValueError(f'modulus {p} out of range 2..2**31-1')

    M = np.array(as_int_matrix(A) % p, dtype=np.int64)
    rows, cols = M.shape
    rank = 0
    for c in range(cols):
        if rank == rows:
            break
        nz = np.flatnonzero(M[rank:, c])
        if nz.size == 0:
            continue
        piv = rank + int(nz[0])
        if piv != rank:
            M[[rank, piv]] = M[[piv, rank]]
        inv = pow(int(M[rank, c]), -1, p)
        M[rank] = (M[rank] * inv) % p
        factors = M[rank + 1:, c].copy()
        M[rank + 1:] = (M[rank + 1:] - np.outer(factors, M[rank]) % p) % p
        rank += 1
    return rank


def rational_rank(A, primes: list = None) -> int:
    """Rank over the rationals by Bareiss elimination, cross-checked modulo two primes

    A prime may divide a minor and report a lower rank. The check fails only if a modular rank
    exceeds the exact one or every prime disagrees with it.

    Parameters
    ----------
    A : array-like
        Integer matrix
    primes : list, optional (default None)
        Moduli for the cross-check, RANK_PRIMES if not provided

    Returns
    -------
    int : The rank

    Raises
    ------
    InternalRankMismatch
        If the modular ranks contradict the exact rank

    """
    M = as_int_matrix(A)
    rank, _, _, max_bits = _bareiss(M)
    logging.debug(f'rank {rank} of {M.shape[0]}x{M.shape[1]}, max pivot bits {max_bits}')

    mod_ranks = [modular_rank(M, p) for p in (primes or RANK_PRIMES)]
    if any(r > rank for r in mod_ranks) or (mod_ranks and all(r != rank for r in mod_ranks)):
        err_msg = f'exact rank {rank} disagrees with modular ranks {mod_ranks}'
        logging.critical(err_msg)
        raise InternalRankMismatch(err_msg)
    for p, r in zip(primes or RANK_PRIMES, mod_ranks):
        if r != rank:
            logging.warning(f'modulus {p} divides a minor, rank {r} instead of {rank}')
    return rank


def determinant(A) -> int:
    M = as_int_matrix(A)
    n = M.shape[0]
    if M.shape != (n, n):
        raise DimensionMismatch(f'determinant needs a square matrix, got {M.shape}')
    if n == 0:
        return 1
    rank, sign, last, _ = _bareiss(M)
    return sign * last if rank == n else 0


@dataclass
class HermiteDecomposition:
    """Row-style Hermite normal form: 'basis' spans the row lattice of the input

    Pivot entries are positive and entries above a pivot lie in [0, pivot). When requested,
    'transform' is unimodular with transform @ A equal to 'basis' followed by zero rows.
    """
    basis: np.ndarray
    pivots: list
    cols: int
    transform: np.ndarray = None

    @property
    def rank(self) -> int:
        return len(self.pivots)


def hnf(A, transform: bool = False) -> HermiteDecomposition:
    """Hermite normal form of the row lattice of 'A'

    Parameters
    ----------
    A : array-like
        Integer matrix
    transform : bool, optional (default False)
        Also accumulate the unimodular row transform

    Returns
    -------
    HermiteDecomposition

    """
    H = as_int_matrix(A)
    rows, cols = H.shape
    U = identity(rows) if transform else None

    r = 0
    pivots = []
    for c in range(cols):
        if r == rows:
            break
        while True:
            nz = r + np.flatnonzero(H[r:, c] != 0)
            if nz.size == 0:
                break
            best = int(nz[np.argmin(np.abs(H[nz, c]))])
            if best != r:
                H[[r, best]] = H[[best, r]]
                if U is not None:
                    U[[r, best]] = U[[best, r]]
            if nz.size == 1:
                break
            quotients = H[r + 1:, c] // H[r, c]
            H[r + 1:] -= np.outer(quotients, H[r])
            if U is not None:
                U[r + 1:] -= np.outer(quotients, U[r])
        if H[r, c] == 0:
            continue
        if H[r, c] < 0:
            H[r] = -H[r]
            if U is not None:
                U[r] = -U[r]
        if r:
            quotients = H[:r, c] // H[r, c]
            H[:r] -= np.outer(quotients, H[r])
            if U is not None:
                U[:r] -= np.outer(quotients, U[r])
        pivots.append(c)
        r += 1

    return HermiteDecomposition(basis=H[:r].copy(), pivots=pivots, cols=cols, transform=U)


def _check_width(h: HermiteDecomposition, V: np.ndarray):
    if V.shape[1] != h.cols:
        raise DimensionMismatch(f'vectors have {V.shape[1]} entries, lattice has {h.cols} columns')


def lattice_members(h: HermiteDecomposition, V) -> np.ndarray:
    """Boolean per row of 'V': does the row lie in the integer row lattice of 'h'

    Raises
    ------
    DimensionMismatch
        If the row length differs from the lattice width

    """
    W = as_int_matrix(V, cols=h.cols)
    _check_width(h, W)
    for r, c in enumerate(h.pivots):
        quotients = W[:, c] // h.basis[r, c]
        W -= np.outer(quotients, h.basis[r])
    return ~np.any(W != 0, axis=1)


def in_lattice(h: HermiteDecomposition, v) -> bool:
    """True iff 'v' reduces to zero against the Hermite basis 'h'"""
    return bool(lattice_members(h, [as_int_vector(v)])[0])


def rational_span_members(h: HermiteDecomposition, V) -> np.ndarray:
    """Boolean per row of 'V': does the row lie in the rational span of the rows behind 'h'"""
    W = as_int_matrix(V, cols=h.cols)
    _check_width(h, W)
    for r, c in enumerate(h.pivots):
        pivot = h.basis[r, c]
        if pivot == 1:
            W -= np.outer(W[:, c], h.basis[r])
            continue
        W = pivot * W - np.outer(W[:, c], h.basis[r])
        for i in np.flatnonzero(np.any(W != 0, axis=1)):
            g = math.gcd(*W[i])
            if g > 1:
                W[i] //= g
    return ~np.any(W != 0, axis=1)


def in_rational_span(A, v) -> bool:
    """True iff appending 'v' to the rows of 'A' leaves the rational rank unchanged

    Raises
    ------
    DimensionMismatch
        If 'v' and the rows of 'A' differ in length

    """
    vec = as_int_vector(v)
    M = as_int_matrix(A, cols=len(vec))
    if M.shape[1] != len(vec):
        raise DimensionMismatch(f'vector has {len(vec)} entries, matrix has {M.shape[1]} columns')
    return rational_rank(M) == rational_rank(np.vstack([M, vec.reshape(1, -1)]))


@dataclass
class SmithDecomposition:
    """Invariant factors d1 | d2 | ... | ds of an integer matrix A

    When transforms are requested U @ A @ V is the rows x cols matrix with the factors on its diagonal.
    """
    factors: list
    rows: int
    cols: int
    U: np.ndarray = None
    V: np.ndarray = None

    @property
    def rank(self) -> int:
        return len(self.factors)

    @property
    def cokernel_rank(self) -> int:
        return self.cols - len(self.factors)

    @property
    def torsion(self) -> list:
        return [d for d in self.factors if d > 1]

    def diagonal(self) -> np.ndarray:
        D = np.zeros((self.rows, self.cols), dtype=object)
        for i, d in enumerate(self.factors):
            D[i, i] = d
        return D


def _swap(D, U, V, t, i, j):
    if i != t:
        D[[t, i]] = D[[i, t]]
        if U is not None:
            U[[t, i]] = U[[i, t]]
    if j != t:
        D[:, [t, j]] = D[:, [j, t]]
        if V is not None:
            V[:, [t, j]] = V[:, [j, t]]


def snf(A, transform: bool = False) -> SmithDecomposition:
    """Smith normal form by minimal-pivot elimination

    The pivot is the nonzero entry of least absolute value, ties to the lowest row then column.
    Row and column t are cleared by division with remainder, re-pivoting on any remainder; if a
    remaining entry is not divisible by the pivot its row is added to row t and clearing resumes.

    Parameters
    ----------
    A : array-like
        Integer matrix
    transform : bool, optional (default False)
        Also accumulate unimodular U and V

    Returns
    -------
    SmithDecomposition

    """
    D = as_int_matrix(A)
    rows, cols = D.shape
    U = identity(rows) if transform else None
    V = identity(cols) if transform else None

    t = 0
    while t < min(rows, cols):
        nz = np.argwhere(D[t:, t:] != 0)
        if nz.size == 0:
            break
        i, j = nz[np.argmin(np.abs(D[t + nz[:, 0], t + nz[:, 1]]))]
        _swap(D, U, V, t, t + int(i), t + int(j))

        while True:
            p = D[t, t]
            quotients = D[t + 1:, t] // p
            D[t + 1:] -= np.outer(quotients, D[t])
            if U is not None:
                U[t + 1:] -= np.outer(quotients, U[t])
            quotients = D[t, t + 1:] // p
            D[:, t + 1:] -= np.outer(D[:, t], quotients)
            if V is not None:
                V[:, t + 1:] -= np.outer(V[:, t], quotients)

            col_nz = t + 1 + np.flatnonzero(D[t + 1:, t] != 0)
            row_nz = t + 1 + np.flatnonzero(D[t, t + 1:] != 0)
            if col_nz.size or row_nz.size:
                cands = [(abs(D[i, t]), i, t) for i in col_nz] + [(abs(D[t, j]), t, j) for j in row_nz]
                _, i, j = min(cands, key=lambda x: (x[0], x[1], x[2]))
                _swap(D, U, V, t, int(i), int(j))
                continue

            rest = D[t + 1:, t + 1:]
            bad = np.argwhere(rest % p != 0)
            if bad.size == 0:
                break
            i = t + 1 + int(bad[0][0])
            D[t] += D[i]
            if U is not None:
                U[t] += U[i]

        if D[t, t] < 0:
            D[t] = -D[t]
            if U is not None:
                U[t] = -U[t]
        t += 1

    factors = [int(D[k, k]) for k in range(t)]
    return SmithDecomposition(factors=factors, rows=rows, cols=cols, U=U, V=V)
