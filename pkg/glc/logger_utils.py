"""Logging and terminal colour utils for glc"""
import logging
import os
import sys
from typing import Optional

import termcolor
import tqdm

LEVEL_COLOURS = {
    logging.DEBUG: "dark_grey",
    logging.INFO: "cyan",
    logging.WARNING: "yellow",
    logging.ERROR: "red",
    logging.CRITICAL: "red",
}


def colour_enabled(stream=None) -> bool:
    """
    Determine if ANSI colours should be written to the given stream

    Arguments:
        stream: the stream to test, defaults to stdout

    Returns:
        (bool): false if GLC_COLOR=0 or the stream is not a terminal
    """
    if os.environ.get("GLC_COLOR", "1") == "0":
        return False
    stream = stream or sys.stdout
    return bool(getattr(stream, "isatty", lambda: False)())


def paint(text: str, colour: Optional[str], enabled: Optional[bool] = None) -> str:
    """
    Colours text with termcolor

    Arguments:
        text (str): the text to colour
        colour (str): a termcolor colour name, None leaves the text untouched
        enabled (bool): overrides the colour_enabled() check

    Returns:
        (str): the (coloured) text
    """
    if enabled is None:
        enabled = colour_enabled()
    if not enabled or colour not in termcolor.COLORS:
        return text
    # colour_enabled() owns the tty and GLC_COLOR checks
    return termcolor.colored(text, colour, force_color=True)


class TqdmLoggingHandler(logging.Handler):
    """
    Handles logging for tqdm, so log lines are written above running progress bars
    """

    def __init__(self, level=logging.NOTSET):
        super().__init__(level)
        self.setFormatter(ColourFormatter())

    def emit(self, record):
        try:
            msg = self.format(record)
            tqdm.tqdm.write(msg, file=sys.stderr)
            self.flush()
        except Exception:
            self.handleError(record)


class ColourFormatter(logging.Formatter):
    """Prefixes each record with its level name, coloured unless GLC_COLOR=0"""

    def __init__(self):
        super().__init__("%(levelname)s:%(name)s: %(message)s")

    def format(self, record):
        msg = super().format(record)
        if not colour_enabled(sys.stderr):
            return msg
        return msg.replace(
            record.levelname,
            paint(record.levelname, LEVEL_COLOURS.get(record.levelno), enabled=True),
            1,
        )
