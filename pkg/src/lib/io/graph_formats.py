import json
import re
from io import BytesIO
from pathlib import Path
from typing import Dict, Hashable, List, Literal, Optional, Tuple, Union

import networkx as nx
import pydot
from loguru import logger
from pydantic import BaseModel, Field, ValidationError

from lib.models import Graph, GraphParseError, GraphValidationError, edge_key

GraphFormat = Literal["json", "dot", "graphml"]
FORMATS: Tuple[str, ...] = ("json", "dot", "graphml")
SUFFIXES: Dict[str, str] = {".json": "json", ".dot": "dot", ".gv": "dot", ".graphml": "graphml", ".xml": "graphml"}

_PREFIXED_NAME = re.compile(r"^n(\d+)$")


class GraphDocument(BaseModel):
    "The JSON graph format"

    class _Node(BaseModel):
        id: int = Field(ge=0)
        w: Optional[float] = Field(None, ge=0)
        h: Optional[float] = Field(None, ge=0)

    nodes: List[_Node]
    edges: List[Tuple[int, int]] = []

    @classmethod
    def from_graph(cls, graph: Graph) -> "GraphDocument":
        return cls(
            nodes=[cls._Node(id=node, w=graph.size(node)[0], h=graph.size(node)[1]) for node in graph.node_ids],
            edges=graph.sorted_edges,
        )


def detect_format(path: Union[str, Path]) -> str:
    "Guess the graph format from a file suffix"
    suffix = Path(path).suffix.lower()
    if suffix not in SUFFIXES:
        raise GraphParseError(f"Cannot infer the graph format of '{path}', pass it explicitly")
    return SUFFIXES[suffix]


def _relabel(names: List[Hashable]) -> Dict[Hashable, int]:
    """
    Map node names onto non-negative integer ids.

    Decimal names keep their value, "n<digits>" names (GraphML convention) drop the
    prefix, anything else is numbered by order of appearance.
    """
    text = [str(name) for name in names]
    if all(t.isdigit() for t in text):
        return {name: int(t) for name, t in zip(names, text)}
    matches = [_PREFIXED_NAME.match(t) for t in text]
    if all(matches):
        mapping = {name: int(m.group(1)) for name, m in zip(names, matches)}
        if len(set(mapping.values())) == len(mapping):
            return mapping
    return {name: i for i, name in enumerate(names)}


def _size_attr(attrs: dict, key: str, default: float) -> float:
    raw = attrs.get(key)
    if raw is None:
        return default
    try:
        value = float(str(raw).strip('"'))
    except ValueError:
        raise GraphParseError(f"Invalid {key} attribute '{raw}'")
    if value <= 0:
        raise GraphValidationError(f"Node {key} must be positive, got {value}")
    return value


def _from_networkx(nx_graph: nx.Graph, default_size: float) -> Tuple[Dict[int, Tuple[float, float]], List[Tuple[int, int]]]:
    mapping = _relabel(list(nx_graph.nodes))
    nodes = {
        mapping[name]: (_size_attr(attrs, "width", default_size), _size_attr(attrs, "height", default_size))
        for name, attrs in nx_graph.nodes(data=True)
    }
    edges = [(mapping[u], mapping[v]) for u, v in nx_graph.edges()]
    return nodes, edges


def _read_json(data: bytes, default_size: float):
    try:
        document = GraphDocument.model_validate_json(data)
    except ValidationError as e:
        raise GraphParseError(f"Malformed JSON graph: {e.error_count()} error(s), first: {e.errors()[0]['msg']}") from e
    nodes: Dict[int, Tuple[float, float]] = {}
    for node in document.nodes:
        if node.id in nodes:
            raise GraphValidationError(f"Duplicate node id {node.id}")
        nodes[node.id] = (
            default_size if node.w is None else node.w,
            default_size if node.h is None else node.h,
        )
    return nodes, list(document.edges)


def _read_dot(data: bytes, default_size: float):
    try:
        parsed = pydot.graph_from_dot_data(data.decode("utf-8"))
    except Exception as e:
        raise GraphParseError(f"Malformed DOT graph: {e}") from e
    if not parsed:
        raise GraphParseError("No graph found in DOT input")
    dot = parsed[0]
    if dot.get_type() != "graph":
        raise GraphParseError("Only undirected DOT graphs ('graph { a -- b; }') are supported")
    nx_graph = nx.nx_pydot.from_pydot(dot)
    if isinstance(nx_graph, nx.MultiGraph) and nx_graph.number_of_edges() != nx.Graph(nx_graph).number_of_edges():
        raise GraphValidationError("DOT graph contains duplicate edges")
    return _from_networkx(nx_graph, default_size)


def _read_graphml(data: bytes, default_size: float):
    try:
        nx_graph = nx.read_graphml(BytesIO(data))
    except Exception as e:
        raise GraphParseError(f"Malformed GraphML graph: {e}") from e
    # Directed or parallel edges collapse onto one undirected edge
    simple = nx.Graph()
    simple.add_nodes_from(nx_graph.nodes(data=True))
    simple.add_edges_from(nx_graph.edges())
    dropped = nx_graph.number_of_edges() - simple.number_of_edges()
    if dropped:
        logger.info(f"Collapsed {dropped} duplicate GraphML edges")
    return _from_networkx(simple, default_size)


_READERS = {"json": _read_json, "dot": _read_dot, "graphml": _read_graphml}


def parse_graph(
    data: Union[bytes, str],
    fmt: str,
    default_size: float = 20.0,
    largest_component: bool = False,
) -> Graph:
    """
    Read and validate a graph.

    Args:
        data (bytes | str): The raw input.
        fmt (str): One of "json", "dot" or "graphml".
        default_size (float): Side of the square box given to nodes without a size.
        largest_component (bool): Keep only the largest component of a disconnected input
            instead of rejecting it.

    Returns:
        Graph: A simple connected graph.
    """
    if fmt not in _READERS:
        raise GraphParseError(f"Unknown graph format '{fmt}', expected one of {', '.join(FORMATS)}")
    if isinstance(data, str):
        data = data.encode("utf-8")
    nodes, edges = _READERS[fmt](data, default_size)

    if not nodes:
        raise GraphValidationError("Graph has no nodes")
    seen = set()
    for u, v in edges:
        if u == v:
            raise GraphValidationError(f"Self-loop on node {u}")
        if u not in nodes or v not in nodes:
            raise GraphValidationError(f"Edge ({u}, {v}) references an unknown node")
        key = edge_key(u, v)
        if key in seen:
            raise GraphValidationError(f"Duplicate edge ({u}, {v})")
        seen.add(key)

    graph = Graph(nodes=dict(sorted(nodes.items())), edges=seen)
    if graph.is_connected():
        return graph
    components = sorted(nx.connected_components(graph.to_networkx()), key=lambda c: (-len(c), min(c)))
    if not largest_component:
        raise GraphValidationError(
            f"Graph is disconnected ({len(components)} components); use the largest-component option to keep one"
        )
    logger.warning(
        f"Keeping the largest of {len(components)} components ({len(components[0])} of {len(graph.nodes)} nodes)"
    )
    return graph.subgraph(components[0])


def serialize_graph(graph: Graph, fmt: str) -> bytes:
    "Write a graph in one of the supported formats"
    if fmt == "json":
        return json.dumps(GraphDocument.from_graph(graph).model_dump(mode="json"), indent=2).encode("utf-8")
    if fmt == "dot":
        dot = pydot.Dot(graph_type="graph")
        for node in graph.node_ids:
            width, height = graph.size(node)
            dot.add_node(pydot.Node(str(node), width=repr(float(width)), height=repr(float(height))))
        for u, v in graph.sorted_edges:
            dot.add_edge(pydot.Edge(str(u), str(v)))
        return dot.to_string().encode("utf-8")
    if fmt == "graphml":
        nx_graph = nx.Graph()
        for node in graph.node_ids:
            width, height = graph.size(node)
            nx_graph.add_node(str(node), width=float(width), height=float(height))
        nx_graph.add_edges_from((str(u), str(v)) for u, v in graph.sorted_edges)
        buffer = BytesIO()
        nx.write_graphml(nx_graph, buffer)
        return buffer.getvalue()
    raise GraphParseError(f"Unknown graph format '{fmt}', expected one of {', '.join(FORMATS)}")
