import json
import os


def dump_json(data: dict) -> str:
    """Serialize a report dictionary into human-readable JSON

    Key order is preserved and the output ends with a newline, so identical reports give byte-identical text.

    Parameters
    ----------
    data : dict
        JSON-compatible dictionary

    Returns
    -------
    str : The indented JSON document

    """
    return json.dumps(data, indent=4, ensure_ascii=False) + '\n'


def load_json(text: str) -> dict:
    """Parse a JSON document produced by 'dump_json'"""
    return json.loads(text)


def write_json(path: str, data: dict) -> str:
    """Write a report dictionary to a JSON file

    Parameters
    ----------
    path : str
        Full path of the file to write
    data : dict
        JSON-compatible dictionary

    Returns
    -------
    str : The full path written to

    Raises
    ------
    FileNotFoundError
        If the parent directory of 'path' does not exist

    """
    parent = os.path.dirname(path)
    if parent and not os.path.isdir(parent):
        raise FileNotFoundError(f'Path {parent} does not exist!')

    with open(file=path, mode='w', encoding='utf-8') as wf:
        wf.write(dump_json(data))

    return path


def read_json(path: str) -> dict:
    with open(file=path, mode='r', encoding='utf-8') as f:
        return json.load(f)
