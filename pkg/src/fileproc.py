import logging
import os

import pandas as pd

from . import NL
from .presentation import SearchInterrupted, emit_presentation, is_torsion_free
from .transition import dump_matrix, matrix_m, matrix_n

INDEX_NAME = 'index.csv'
INDEX_COLUMNS = ['seq', 'file', 'triples', 'torsion_free']


def presentation_filename(q: int, seq: int) -> str:
    return f'tp_{q}_{seq:04d}.tp'


class outputs:
    """Class for writing search results and matrix dumps into an output directory

    Attributes
    ----------
    out_dir : str
        Directory all files are written into, created on first use

    """
    def __init__(self, out_dir: str):
        self.out_dir = out_dir

    def _ensure_dir(self):
        if not os.path.isdir(self.out_dir):
            os.makedirs(self.out_dir)
            logging.info(f"created output directory '{self.out_dir}'")

    def write_index(self, df: pd.DataFrame) -> str:
        """Write the index table under a '# count=N' line

        Parameters
        ----------
        df : pd.DataFrame
            One row per presentation file with INDEX_COLUMNS

        Returns
        -------
        str : The full path of the index file

        """
        self._ensure_dir()
        index_file = os.path.join(self.out_dir, INDEX_NAME)
        with open(index_file, mode='w', encoding='utf-8', newline='') as f:
            f.write(f'# count={len(df)}{NL}')
            df.to_csv(f, index=False, lineterminator=NL)
        return index_file

    def write_search(self, stream, q: int) -> pd.DataFrame:
        """Write every presentation of 'stream' to its own file, then the index

        The index is written even when the search is cancelled, listing the files already written.

        Parameters
        ----------
        stream : iterable
            TrianglePresentation objects in emission order
        q : int
            Order, used in the file names

        Returns
        -------
        pd.DataFrame : The index table

        Raises
        ------
        SearchInterrupted
            Re-raised from 'stream' after the partial index is written

        """
        self._ensure_dir()
        records = []
        try:
            for seq, tp in enumerate(stream, start=1):
                name = presentation_filename(q, seq)
                with open(os.path.join(self.out_dir, name), mode='w', encoding='utf-8', newline='') as f:
                    f.write(emit_presentation(tp))
                records.append([seq, name, len(tp.triples), is_torsion_free(tp)])
        except SearchInterrupted:
            logging.warning(f'search cancelled, indexing {len(records)} files written so far')
            self.write_index(pd.DataFrame(records, columns=INDEX_COLUMNS))
            raise

        df = pd.DataFrame(records, columns=INDEX_COLUMNS)
        self.write_index(df)
        logging.info(f"wrote {len(df)} presentations to '{self.out_dir}'")
        return df

    def dump_matrices(self, tp) -> list:
        """Write M.txt and N.txt for a presentation, returning their paths"""
        self._ensure_dir()
        return [
            dump_matrix(matrix_m(tp), os.path.join(self.out_dir, 'M.txt')),
            dump_matrix(matrix_n(tp), os.path.join(self.out_dir, 'N.txt'))
        ]


def read_index(index_file: str) -> pd.DataFrame:
    """Read an index written by 'outputs.write_index'

    Raises
    ------
    FileNotFoundError
        If 'index_file' does not exist
    ValueError
        If the count line disagrees with the table

    """
    if not os.path.isfile(index_file):
        raise FileNotFoundError(f"index file '{index_file}' does not exist")

    with open(index_file, mode='r', encoding='utf-8') as f:
        first = f.readline().strip()
        if not first.startswith('# count='):
            raise ValueError(f"index file '{index_file}' has no count line")
        count = int(first.split('=', 1)[1])
        df = pd.read_csv(f)

    if len(df) != count:
        raise ValueError(f'index lists {len(df)} files but declares {count}')
    return df
