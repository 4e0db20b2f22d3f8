from lib.models import GraphParseError, GraphValidationError

from .config_file import load_config, read_config_file
from .graph_formats import FORMATS, SUFFIXES, GraphDocument, detect_format, parse_graph, serialize_graph
from .layout_json import LayoutDocument, parse_layout, serialize_layout, serialize_placements
from .trace_writer import TraceWriter

__all__ = [
    "GraphParseError",
    "GraphValidationError",
    "load_config",
    "read_config_file",
    "FORMATS",
    "SUFFIXES",
    "GraphDocument",
    "detect_format",
    "parse_graph",
    "serialize_graph",
    "LayoutDocument",
    "parse_layout",
    "serialize_layout",
    "serialize_placements",
    "TraceWriter",
]
