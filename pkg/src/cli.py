import argparse
from dataclasses import dataclass
import logging
import os
import signal
import sys
import threading

from . import OUTPUT_FORMATS, __version__
from .fileproc import outputs
from .jsonstuff import dump_json
from .ktheory import NoTorsionFreeGroup, betti_chi, compute_report, render_text
from .misc import get_config, initiate_logging
from .plane import (
    NotAProjectivePlane, NotPrimePower, ParseError, difference_set_plane, emit_incidence, make_plane,
    parse_incidence
)
from .presentation import (
    TORSION_CRITERION, PointLineCorrespondence, SearchInterrupted, ValidationError, is_torsion_free,
    parse_correspondence, parse_presentation, search
)

COMMANDS = ['verify', 'ktheory', 'search', 'betti', 'plane']
SEARCH_PLANES = ['canonical-difference-set', 'canonical']
EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(ValueError):
    pass


@dataclass
class RunConfig:
    """One validated command line

    Attributes
    ----------
    command : str
        One of COMMANDS
    inputs : list
        Input file paths
    q : int
        Order for search, betti and plane
    torsion_free_only : bool
    exhaustive : bool
    limit : int
        Search limit, None when exhaustive
    output_format : str
        One of OUTPUT_FORMATS
    out_dir : str
    dump_matrices : str
        Directory for M.txt and N.txt, None to skip
    plane : str
        Plane used by search, one of SEARCH_PLANES
    lambda_file : str
    all_lambdas : bool
    difference_set : bool
    config_file : str

    """
    command: str
    inputs: list
    q: int = None
    torsion_free_only: bool = False
    exhaustive: bool = False
    limit: int = None
    output_format: str = 'text'
    out_dir: str = None
    dump_matrices: str = None
    plane: str = SEARCH_PLANES[0]
    lambda_file: str = None
    all_lambdas: bool = False
    difference_set: bool = False
    config_file: str = None

    @classmethod
    def from_args(cls, ns: argparse.Namespace) -> 'RunConfig':
        """Build from parsed arguments, raising UsageError for flag combinations argparse cannot express"""
        cfg = cls(
            command=ns.command,
            inputs=[ns.file] if getattr(ns, 'file', None) else [],
            q=getattr(ns, 'q', None),
            torsion_free_only=getattr(ns, 'torsion_free_only', False),
            exhaustive=getattr(ns, 'exhaustive', False),
            limit=getattr(ns, 'limit', None),
            output_format='json' if getattr(ns, 'json', False) else 'text',
            out_dir=getattr(ns, 'out', None),
            dump_matrices=getattr(ns, 'dump_matrices', None),
            plane=getattr(ns, 'plane', SEARCH_PLANES[0]),
            lambda_file=getattr(ns, 'lambda_file', None),
            all_lambdas=getattr(ns, 'all_lambdas', False),
            difference_set=getattr(ns, 'difference_set', False),
            config_file=ns.config
        )
        cfg.validate()
        return cfg

    def validate(self):
        if self.command not in COMMANDS:
            raise UsageError(f"unknown command '{self.command}'")
        if self.output_format not in OUTPUT_FORMATS:
            raise UsageError(f"unknown output format '{self.output_format}'")
        if self.q is not None and self.q < 2:
            raise UsageError(f'--q must be at least 2, got {self.q}')
        if self.command == 'search':
            if self.limit is not None and self.limit < 0:
                raise UsageError(f'--limit must be non-negative, got {self.limit}')
            if self.all_lambdas and self.lambda_file:
                raise UsageError('--all-lambdas and --lambda-file are exclusive')
            if self.all_lambdas and self.q != 2:
                raise UsageError('--all-lambdas is only supported for q=2')
        if self.command == 'plane' and (self.q is None) == (not self.inputs):
            raise UsageError('plane needs exactly one of --q and --file')


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog='triangle-ktheory',
        description='K-theory invariants and lemma checks for triangle presentations of A2-tilde groups'
    )
    parser.add_argument('--version', action='version', version=f'%(prog)s {__version__}')
    parser.add_argument('--config', default=None, help='JSON configuration file')
    sub = parser.add_subparsers(dest='command', required=True)

    p = sub.add_parser('verify', help='check the triangle presentation axioms of a file')
    p.add_argument('file')

    p = sub.add_parser('ktheory', help='compute K-groups, harmonic dimension and run the lemma suite')
    p.add_argument('file')
    p.add_argument('--json', action='store_true', help='emit a JSON document')
    p.add_argument('--dump-matrices', metavar='DIR', default=None, help='write M.txt and N.txt into DIR')

    p = sub.add_parser('search', help='search for triangle presentations')
    p.add_argument('--q', type=int, required=True)
    p.add_argument('--plane', choices=SEARCH_PLANES, default=SEARCH_PLANES[0])
    p.add_argument('--lambda-file', default=None, help='file of lambda rows, identity if not given')
    p.add_argument('--all-lambdas', action='store_true', help='enumerate every lambda (q=2 only)')
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument('--limit', type=int)
    group.add_argument('--exhaustive', action='store_true')
    p.add_argument('--torsion-free-only', action='store_true')
    p.add_argument('--out', metavar='DIR', required=True)

    p = sub.add_parser('betti', help='beta2 and chi of a torsion free group of order q')
    p.add_argument('--q', type=int, required=True)

    p = sub.add_parser('plane', help='print or validate a projective plane')
    p.add_argument('--q', type=int, default=None)
    p.add_argument('--difference-set', action='store_true', help='cyclic plane instead of PG(2,q)')
    p.add_argument('--file', default=None, help='incidence file to validate')

    return parser


def _read(path: str) -> str:
    if not os.path.isfile(path):
        raise FileNotFoundError(f"file '{path}' does not exist")
    with open(path, mode='r', encoding='utf-8') as f:
        return f.read()


def cmd_verify(cfg: RunConfig) -> int:
    try:
        tp = parse_presentation(_read(cfg.inputs[0]))
    except ValidationError as e:
        print('\n'.join(e.report.lines()))
        return EXIT_FAIL
    print(f'valid: |T|={len(tp.triples)}')
    print(f'torsion_free={str(is_torsion_free(tp)).lower()} ({TORSION_CRITERION})')
    return EXIT_OK


def cmd_ktheory(cfg: RunConfig) -> int:
    try:
        tp = parse_presentation(_read(cfg.inputs[0]))
    except ValidationError as e:
        print('\n'.join(e.report.lines()))
        return EXIT_FAIL

    if cfg.dump_matrices:
        outputs(cfg.dump_matrices).dump_matrices(tp)

    report = compute_report(tp, primes=get_config('rankPrimes', cfg.config_file))
    if cfg.output_format == 'json':
        print(dump_json(report.to_dict()), end='')
    else:
        print(render_text(report), end='')
    return EXIT_FAIL if report.failed else EXIT_OK


def _search_plane(cfg: RunConfig):
    if cfg.plane == 'canonical':
        return make_plane(cfg.q)
    try:
        return difference_set_plane(cfg.q)
    except NotImplementedError as e:
        raise UsageError(str(e))


def cmd_search(cfg: RunConfig) -> int:
    plane = _search_plane(cfg)
    if cfg.all_lambdas:
        lam = None
    elif cfg.lambda_file:
        lam = parse_correspondence(_read(cfg.lambda_file), plane)
    else:
        lam = PointLineCorrespondence.identity(plane)

    cancel = threading.Event()
    stream = search(
        plane, lam, limit=None if cfg.exhaustive else cfg.limit, torsion_free_only=cfg.torsion_free_only,
        cancel=cancel, progress_every=get_config('searchProgressEvery', cfg.config_file)
    )

    previous = None
    if threading.current_thread() is threading.main_thread():
        previous = signal.signal(signal.SIGINT, lambda signum, frame: cancel.set())
    try:
        df = outputs(cfg.out_dir).write_search(stream, cfg.q)
    except SearchInterrupted as e:
        print(f'interrupted: {e.emitted} presentations written')
        return EXIT_FAIL
    finally:
        if previous is not None:
            signal.signal(signal.SIGINT, previous)

    print(f'count={len(df)}')
    return EXIT_OK


def cmd_betti(cfg: RunConfig) -> int:
    try:
        beta2, chi = betti_chi(cfg.q)
    except NoTorsionFreeGroup as e:
        print(str(e))
        return EXIT_FAIL
    print(f'beta2={beta2} chi={chi}')
    return EXIT_OK


def cmd_plane(cfg: RunConfig) -> int:
    if cfg.inputs:
        try:
            plane = parse_incidence(_read(cfg.inputs[0]))
        except NotAProjectivePlane as e:
            print(f'invalid: {e}')
            return EXIT_FAIL
        print(f'valid: order {plane.order}, {plane.size} points')
        return EXIT_OK

    try:
        plane = difference_set_plane(cfg.q) if cfg.difference_set else make_plane(cfg.q)
    except NotImplementedError as e:
        raise UsageError(str(e))
    print(emit_incidence(plane), end='')
    return EXIT_OK


HANDLERS = {
    'verify': cmd_verify,
    'ktheory': cmd_ktheory,
    'search': cmd_search,
    'betti': cmd_betti,
    'plane': cmd_plane
}


def run(argv: list = None) -> int:
    """Parse 'argv', run the command and return the exit status

    0 on success, 1 for a domain failure such as an invalid presentation or a failed check,
    2 for usage, parse and file errors.
    """
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else EXIT_USAGE

    try:
        initiate_logging('triangle_ktheory', ns.config)
        cfg = RunConfig.from_args(ns)
        logging.info(f'running {cfg.command}')
        return HANDLERS[cfg.command](cfg)
    except (UsageError, NotPrimePower) as e:
        logging.error(str(e))
        print(f'usage error: {e}', file=sys.stderr)
        return EXIT_USAGE
    except (ParseError, NotAProjectivePlane) as e:
        logging.error(str(e))
        print(f'parse error: {e}', file=sys.stderr)
        return EXIT_USAGE
    except (OSError, NotImplementedError) as e:
        logging.error(str(e))
        print(f'error: {e}', file=sys.stderr)
        return EXIT_USAGE


def main():
    sys.exit(run())


if __name__ == '__main__':
    main()
