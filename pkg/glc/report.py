"""JSON and XML renderings of the adequacy and law reports"""
import json
import logging

from dict2xml import dict2xml

from glc.logger_utils import TqdmLoggingHandler
from glc.typehints import JsonValue
from glc.utils import write_text

logger = logging.getLogger(__name__)
logger.addHandler(TqdmLoggingHandler())
logger.propagate = False

ADEQUACY_ROOT = "AdequacyReport"
LAW_ROOT = "LawReport"


def to_json(document: JsonValue) -> str:
    return json.dumps(document, indent=4)


def _xml_safe(document: JsonValue) -> JsonValue:
    """dict2xml prints None literally; missing values become empty elements instead"""
    if document is None:
        return ""
    if isinstance(document, bool):
        return str(document).lower()
    if isinstance(document, dict):
        return {key: _xml_safe(value) for key, value in document.items()}
    if isinstance(document, list):
        return [_xml_safe(value) for value in document]
    return document


def to_xml(document: JsonValue, root: str) -> str:
    """
    Renders a report as XML

    Arguments:
        document (JsonValue): the report, as produced by to_dict()
        root (str): the name of the root element

    Returns:
        (str): the XML text
    """
    return dict2xml({root: _xml_safe(document)})


def write_report_xml(path: str, document: JsonValue, root: str):
    """
    Writes a report as XML

    Arguments:
        path (str): the output destination
        document (JsonValue): the report, as produced by to_dict()
        root (str): ADEQUACY_ROOT or LAW_ROOT

    Raises:
        OSError: if the file could not be written
    """
    write_text(path, to_xml(document, root))
    logger.info('Report written to "%s"', path)
