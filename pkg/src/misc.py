import datetime as dt
import json
import logging
import os
import re
import sys
import traceback

from . import BOOLEANS, CONFIG_DEFAULTS

LOG_FORMAT = '%(asctime)s\t%(funcName)s\t%(levelname)s\t%(message)s'


def get_config(key: str, config_file: str = None):
    """Return a key value from the library configuration file

    Parameters
    ----------
    key : str
        Name of key to use
    config_file : str, optional (default None)
        Full path of a JSON configuration file. The packaged default is returned if not provided.

    Returns
    -------
    The associated value for 'key', or its default if the file does not define it

    Raises
    ------
    FileNotFoundError
        If 'config_file' file does not exist
    NotImplementedError
        If 'config_file' is not a JSON file

    """
    if config_file is None:
        return CONFIG_DEFAULTS.get(key)

    if not os.path.isfile(config_file):
        raise FileNotFoundError(f"config file '{config_file}' does not exist")

    config_type = os.path.splitext(config_file)[1].lower().replace('.', '')
    if config_type != 'json':
        raise NotImplementedError(f"config file '{os.path.basename(config_file)}' not supported")

    with open(config_file, 'r') as cf:
        key_data = json.load(cf)
        val = key_data.get(key, CONFIG_DEFAULTS.get(key))

    return val


def log_exception(exctype, value, tb):
    """Log exception by using the root logger

    Taken from https://stackoverflow.com/a/48643567

    Parameters
    ----------
    exctype : exception_type
    value : NameError
    tb : traceback

    """

    write_val = {
        'type': re.sub(r'<|>', '', str(exctype)),
        'description': str(value),
        'traceback': str(traceback.format_tb(tb, 10))
    }
    logging.critical(str(write_val))


def initiate_logging(script_name: str, config_file: str = None, write_file: bool = True) -> str:
    """Initiate standard logging

    Set-up base logging configuration. Messages go to stderr so stdout stays reserved for
    reproducible command output.

    Parameters
    ----------
    script_name : str
        Name of the script logging is being initiated from
    config_file : str, optional (default None)
        Full path of a configuration file
    write_file : bool (default True)
        Indicator if the logs should also be written to file, only honoured if 'logRoot' is configured

    Returns
    -------
    str : Full path of the log file being written to, or None if no file is written

    """
    log_root = get_config('logRoot', config_file)
    log_level = get_config('logLevel', config_file)

    log_file = None
    log_handlers = [logging.StreamHandler(sys.stderr)]
    write_file = write_file if write_file in BOOLEANS else True
    if write_file and log_root:
        if not os.path.isdir(log_root):
            os.makedirs(log_root)
        dte = dt.datetime.now().strftime('%Y%m%d%H%M%S')
        log_file = os.path.join(log_root, f'{script_name}_{dte}.log')
        if not os.path.isfile(log_file):
            open(log_file, 'a').close()
        log_handlers.append(logging.FileHandler(log_file))

    logging.basicConfig(
        level=getattr(logging, str(log_level).upper(), logging.INFO),
        format=LOG_FORMAT,
        handlers=log_handlers,
        force=True
    )

    sys.excepthook = log_exception  # force unhandled exceptions to write to the log

    return log_file
