from dataclasses import dataclass, field
from functools import cached_property
import logging
import time

import numpy as np

from . import NL
from .cellcomplex import cell_index, edge_sum, epsilon, euler_characteristic, inverse_edge_sum
from .exactlin import (
    InternalRankMismatch, hnf, lattice_members, rational_rank, rational_span_members, snf
)
from .presentation import TORSION_CRITERION, TrianglePresentation, is_torsion_free
from .transition import matrix_m, matrix_n

RELATION_KINDS = ['RELS', 'REL0']
LEMMA_NAMES = [
    'epsilon_torsion',
    'edge_exchange',
    'edge_triple_sum',
    'edge_sums_vanish_real',
    'cyclic_relations_imply_transition',
    'real_rank_agreement'
]
EMPIRICAL_FOR_TORSION = ['edge_sums_vanish_real', 'real_rank_agreement']
REPORT_KEYS = [
    'q', 'cells', 'torsion_free', 'rank', 'torsion', 'k0_rank', 'harmonic_dim', 'chi', 'beta2', 'lemmas', 'theorem'
]
NOT_APPLICABLE = 'n/a'
SUPERSCRIPTS = str.maketrans('0123456789', '⁰¹²³⁴⁵⁶⁷⁸⁹')


class NoTorsionFreeGroup(ValueError):
    pass


class NotTorsionFree(ValueError):
    pass


@dataclass(frozen=True)
class RelationSystem:
    """Relation vectors as rows, columns in cell order"""
    kind: str
    matrix: np.ndarray = field(repr=False, compare=False)

    @property
    def shape(self) -> tuple:
        return self.matrix.shape


def relations(tp: TrianglePresentation, kind: str) -> RelationSystem:
    """Assemble the relation matrix of C(Gamma) or of C0(Gamma)

    RELS holds e_a - (row a of M) for every cell, then e_a - (row a of N).
    REL0 holds e_a - e_shift(a) for every cell, then e_a - e_shift2(a), then the edge sums <xi>
    for every point, then the inverse edge sums.

    Raises
    ------
    ValueError
        If 'kind' is not one of RELATION_KINDS

    """
    size = len(tp.triples)
    eye = np.eye(size, dtype=np.int64)
    if kind == 'RELS':
        blocks = [eye - matrix_m(tp).entries, eye - matrix_n(tp).entries]
    elif kind == 'REL0':
        idx = cell_index(tp)
        points = range(tp.plane.size)
        blocks = [
            eye - eye[idx.shift],
            eye - eye[idx.shift2],
            np.array([edge_sum(tp, xi) for xi in points], dtype=np.int64).reshape(-1, size),
            np.array([inverse_edge_sum(tp, xi) for xi in points], dtype=np.int64).reshape(-1, size)
        ]
    else:
        raise ValueError(f"relation kind '{kind}' not one of {RELATION_KINDS}")
    return RelationSystem(kind=kind, matrix=np.vstack(blocks).astype(object))


@dataclass(frozen=True)
class LemmaVerdict:
    """Outcome of one exact check; 'witness' is the first failing vector, empty on success"""
    name: str
    status: str
    failures: int = 0
    witness: tuple = ()

    @property
    def failed(self) -> bool:
        return self.status == 'fail'


@dataclass(frozen=True)
class TheoremReport:
    status: str
    rank: int
    harmonic_dim: int
    beta2: int
    k0_rank: int
    chi: int
    chi_formula: int


class analysis:
    """Lazily computed relation matrices, normal forms and ranks of one presentation

    Each quantity is computed at most once, so a full report needs one Hermite form per relation
    system and one Smith form.
    """
    def __init__(self, tp: TrianglePresentation, primes: list = None):
        self.tp = tp
        self.primes = primes
        self.timings = {}

    def _timed(self, label: str, func, *args, **kwargs):
        start = time.perf_counter()
        result = func(*args, **kwargs)
        self.timings[label] = time.perf_counter() - start
        logging.info(f'{label} took {self.timings[label]:.3f}s')
        return result

    @cached_property
    def size(self) -> int:
        return len(self.tp.triples)

    @cached_property
    def torsion_free(self) -> bool:
        return is_torsion_free(self.tp)

    @cached_property
    def rels(self) -> RelationSystem:
        return self._timed('RELS assembly', relations, self.tp, 'RELS')

    @cached_property
    def rel0(self) -> RelationSystem:
        return self._timed('REL0 assembly', relations, self.tp, 'REL0')

    @cached_property
    def rels_hnf(self):
        return self._timed('RELS hermite form', hnf, self.rels.matrix)

    @cached_property
    def rel0_hnf(self):
        return self._timed('REL0 hermite form', hnf, self.rel0.matrix)

    def _checked_rank(self, system: RelationSystem, hermite) -> int:
        rank = self._timed(f'{system.kind} rank', rational_rank, system.matrix, self.primes)
        if rank != hermite.rank:
            err_msg = f'{system.kind} rank {rank} differs from hermite rank {hermite.rank}'
            logging.critical(err_msg)
            raise InternalRankMismatch(err_msg)
        return rank

    @cached_property
    def rels_rank(self) -> int:
        return self._checked_rank(self.rels, self.rels_hnf)

    @cached_property
    def rel0_rank(self) -> int:
        return self._checked_rank(self.rel0, self.rel0_hnf)

    @cached_property
    def smith(self):
        # the Hermite basis spans the same row lattice, so its invariant factors are those of RELS
        return self._timed('RELS smith form', snf, self.rels_hnf.basis)

    @cached_property
    def invariants(self) -> tuple:
        factors = self.smith.factors
        if len(factors) != self.rels_rank:
            err_msg = f'{len(factors)} invariant factors but rank {self.rels_rank}'
            logging.critical(err_msg)
            raise InternalRankMismatch(err_msg)
        return self.size - len(factors), self.smith.torsion

    @cached_property
    def harmonic_dimension(self) -> int:
        return self.size - self.rel0_rank


def c_gamma_invariants(tp: TrianglePresentation) -> tuple:
    """Return (r, torsion factors) with C(Gamma) = Z^r + T, from the Smith form of RELS"""
    return analysis(tp).invariants


@dataclass(frozen=True)
class KGroups:
    rank: int
    torsion: tuple

    def __str__(self):
        return f'K₀ = K₁ = {format_group(self.rank, self.torsion)}'


def format_group(free_rank: int, torsion) -> str:
    """Render Z^free_rank + Z/d1 + ... in unicode, '0' for the trivial group"""
    terms = []
    if free_rank == 1:
        terms.append('ℤ')
    elif free_rank > 1:
        terms.append('ℤ' + str(free_rank).translate(SUPERSCRIPTS))
    terms.extend(f'ℤ/{d}' for d in torsion)
    return ' ⊕ '.join(terms) if terms else '0'


def k_groups(tp: TrianglePresentation, r: int = None, torsion: list = None) -> KGroups:
    """K0 = K1 = Z^(2r) + T, formatted from already computed invariants when given"""
    if r is None or torsion is None:
        r, torsion = c_gamma_invariants(tp)
    return KGroups(rank=2 * r, torsion=tuple(torsion))


def harmonic_dimension(tp: TrianglePresentation) -> int:
    """Dimension of the harmonic 2-cochains: |T| minus the rational rank of REL0"""
    return analysis(tp).harmonic_dimension


def betti_chi(q: int) -> tuple:
    """Return (beta2, chi) = ((q-2)(q^2+q+1)/3, (q-1)(q^2-1)/3)

    Raises
    ------
    ValueError
        If q < 2
    NoTorsionFreeGroup
        If either value is not an integer

    """
    if q < 2:
        raise ValueError(f'order must be at least 2, got {q}')
    beta_num = (q - 2) * (q * q + q + 1)
    chi_num = (q - 1) * (q * q - 1)
    if beta_num % 3 or chi_num % 3:
        raise NoTorsionFreeGroup(f'no torsion-free group of order {q}')
    return beta_num // 3, chi_num // 3


def _lattice_verdict(name: str, hermite, vectors, status_ok='pass', status_bad='fail') -> LemmaVerdict:
    vectors = np.asarray(vectors, dtype=object).reshape(-1, hermite.cols)
    members = lattice_members(hermite, vectors)
    return _verdict(name, members, vectors, status_ok, status_bad)


def _verdict(name, members, vectors, status_ok, status_bad) -> LemmaVerdict:
    failed = np.flatnonzero(~members)
    if not failed.size:
        return LemmaVerdict(name=name, status=status_ok)
    witness = tuple(int(x) for x in vectors[failed[0]])
    logging.warning(f'{name} failed for {failed.size} vectors')
    return LemmaVerdict(name=name, status=status_bad, failures=int(failed.size), witness=witness)


def lemma_suite(tp: TrianglePresentation, state: analysis = None) -> dict:
    """Run the six exact checks relating C(Gamma) and C0(Gamma)

    epsilon_torsion: (q^2-1) epsilon lies in the integer lattice of RELS.
    edge_exchange: <a1> - shift2(a) - <a2 bar> + shift(a) lies in that lattice for every cell.
    edge_triple_sum: <a0> + <a1> + <a2> - epsilon lies in that lattice for every cell.
    edge_sums_vanish_real: every REL0 row lies in the rational span of RELS.
    cyclic_relations_imply_transition: every RELS row lies in the integer lattice of REL0.
    real_rank_agreement: RELS and REL0 have the same rational rank.

    The two rational checks are reported as empirical for presentations with torsion.

    Returns
    -------
    dict : LemmaVerdict by name, in LEMMA_NAMES order

    """
    state = state or analysis(tp)
    idx = cell_index(tp)
    q = tp.order
    eps = epsilon(tp)
    size = len(idx)

    points = range(tp.plane.size)
    edges = np.array([edge_sum(tp, xi) for xi in points], dtype=np.int64).reshape(-1, size)
    inverse_edges = np.array([inverse_edge_sum(tp, xi) for xi in points], dtype=np.int64).reshape(-1, size)
    a0, a1, a2 = idx.columns[:, 0], idx.columns[:, 1], idx.columns[:, 2]

    eye = np.eye(size, dtype=np.int64)
    exchange = edges[a1] - eye[idx.shift2] - inverse_edges[a2] + eye[idx.shift]
    triple_sum = edges[a0] + edges[a1] + edges[a2] - eps

    empirical = not state.torsion_free
    ok, bad = ('empirical-pass', 'empirical-fail') if empirical else ('pass', 'fail')

    verdicts = [
        _lattice_verdict('epsilon_torsion', state.rels_hnf, [(q * q - 1) * eps]),
        _lattice_verdict('edge_exchange', state.rels_hnf, exchange),
        _lattice_verdict('edge_triple_sum', state.rels_hnf, triple_sum),
        _verdict(
            'edge_sums_vanish_real', rational_span_members(state.rels_hnf, state.rel0.matrix),
            state.rel0.matrix, ok, bad
        ),
        _lattice_verdict('cyclic_relations_imply_transition', state.rel0_hnf, state.rels.matrix),
        LemmaVerdict(
            name='real_rank_agreement',
            status=ok if state.rels_rank == state.rel0_rank else bad,
            failures=0 if state.rels_rank == state.rel0_rank else 1
        )
    ]
    return {v.name: v for v in verdicts}


def main_theorem_check(tp: TrianglePresentation, state: analysis = None) -> TheoremReport:
    """Check r = harmonic dimension = beta2, K0 free rank 2 beta2, chi against its formula and chi - 1 = beta2

    Raises
    ------
    NotTorsionFree
        If the presentation has a relator xi^3 = 1

    """
    state = state or analysis(tp)
    if not state.torsion_free:
        raise NotTorsionFree(f'presentation fails the {TORSION_CRITERION} criterion')

    r, torsion = state.invariants
    dim = state.harmonic_dimension
    chi = euler_characteristic(tp)
    try:
        beta2, chi_expected = betti_chi(tp.order)
    except NoTorsionFreeGroup:
        logging.critical(f'torsion free presentation of order {tp.order} contradicts the Betti formula')
        beta2, chi_expected = None, None

    k0_rank = k_groups(tp, r, torsion).rank
    checks = [
        beta2 is not None,
        r == dim == beta2,
        k0_rank == 2 * (beta2 or 0),
        chi.chi == chi_expected,
        beta2 is not None and chi.chi - 1 == beta2
    ]
    status = 'pass' if all(checks) else 'fail'
    if status == 'fail':
        logging.error(f'theorem check failed: r={r} harmonic_dim={dim} beta2={beta2} chi={chi.chi}')
    return TheoremReport(
        status=status, rank=r, harmonic_dim=dim, beta2=beta2, k0_rank=k0_rank, chi=chi.chi, chi_formula=chi_expected
    )


@dataclass
class KTheoryReport:
    """Everything the ktheory command prints; 'timings' is a side channel left out of comparisons and JSON"""
    q: int
    cells: int
    torsion_free: bool
    rank: int
    torsion: list
    k0_rank: int
    harmonic_dim: int
    chi: int
    beta2: object
    lemmas: dict
    theorem: str
    timings: dict = field(default_factory=dict, compare=False, repr=False)

    @property
    def k_groups(self) -> KGroups:
        return KGroups(rank=self.k0_rank, torsion=tuple(self.torsion))

    @property
    def failed(self) -> bool:
        return self.theorem == 'fail' or any(s == 'fail' for s in self.lemmas.values())

    def to_dict(self) -> dict:
        return {key: getattr(self, key) for key in REPORT_KEYS}

    @classmethod
    def from_dict(cls, data: dict) -> 'KTheoryReport':
        missing = [key for key in REPORT_KEYS if key not in data]
        if missing:
            raise ValueError(f'report is missing keys {missing}')
        values = {key: data[key] for key in REPORT_KEYS}
        values['torsion'] = [int(d) for d in values['torsion']]
        values['lemmas'] = dict(values['lemmas'])
        return cls(**values)


def compute_report(tp: TrianglePresentation, primes: list = None) -> KTheoryReport:
    """Run the full pipeline: invariants of C(Gamma), K-groups, harmonic dimension, lemmas and theorem"""
    state = analysis(tp, primes)
    r, torsion = state.invariants
    groups = k_groups(tp, r, torsion)
    lemmas = lemma_suite(tp, state)

    if state.torsion_free:
        theorem = main_theorem_check(tp, state).status
        beta2 = _beta2_or_na(tp.order)
    else:
        theorem = 'skipped'
        beta2 = NOT_APPLICABLE

    report = KTheoryReport(
        q=tp.order,
        cells=state.size,
        torsion_free=state.torsion_free,
        rank=r,
        torsion=list(torsion),
        k0_rank=groups.rank,
        harmonic_dim=state.harmonic_dimension,
        chi=euler_characteristic(tp).chi,
        beta2=beta2,
        lemmas={name: lemmas[name].status for name in LEMMA_NAMES},
        theorem=theorem,
        timings=dict(state.timings)
    )
    logging.info(f'report for q={report.q} with {report.cells} cells finished, theorem={theorem}')
    return report


def _beta2_or_na(q: int):
    try:
        return betti_chi(q)[0]
    except NoTorsionFreeGroup:
        return NOT_APPLICABLE


def render_text(report: KTheoryReport) -> str:
    torsion = ' '.join(str(d) for d in report.torsion) or 'none'
    rows = [
        f'q={report.q} cells={report.cells}',
        f'torsion_free={str(report.torsion_free).lower()} ({TORSION_CRITERION})',
        f'torsion={torsion}',
        str(report.k_groups)
    ]
    rows.extend(f'lemma {name}={status}' for name, status in report.lemmas.items())
    rows.append(
        f'rank={report.rank} k0_rank={report.k0_rank} harmonic_dim={report.harmonic_dim} '
        f'chi={report.chi} beta2={report.beta2} theorem={report.theorem}'
    )
    return NL.join(rows) + NL
