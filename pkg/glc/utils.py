"""
Random utilities for glc
"""
import logging
import os
from typing import Iterable

from glc.logger_utils import TqdmLoggingHandler

logger = logging.getLogger(__name__)
logger.addHandler(TqdmLoggingHandler())
logger.propagate = False

SOURCE_EXTENSION = ".gml"


def read_source(path: str) -> str:
    """
    Reads a program source file

    Arguments:
        path (str): the path of the .gml file

    Returns:
        (str): the decoded source text

    Raises:
        OSError: if the file could not be opened or is not valid UTF-8
    """
    if not path.endswith(SOURCE_EXTENSION):
        logger.warning('"%s" does not have the %s extension', path, SOURCE_EXTENSION)

    try:
        with open(path, "r", encoding="utf-8") as fin:
            return fin.read()
    except UnicodeDecodeError as err:
        raise OSError(f'"{path}" is not valid UTF-8') from err
    except OSError as err:
        raise OSError(f'Could not open "{path}" for reading') from err


def write_text(path: str, text: str):
    """
    Writes text to a file, creating parent directories as needed

    Arguments:
        path (str): the output destination
        text (str): the content

    Raises:
        OSError: if the file could not be written
    """
    directory = os.path.dirname(path)
    if directory:
        os.makedirs(directory, exist_ok=True)

    try:
        with open(path, "w+", encoding="utf-8") as fout:
            fout.write(text)
    except OSError as err:
        raise OSError(f'Could not open "{path}" for writing') from err

    logger.debug('Wrote "%s"', path)


def format_events(events: Iterable[int]) -> str:
    """Events as a bracketed list, e.g. [2, 1, 0]"""
    return "[" + ", ".join(str(event) for event in events) + "]"
