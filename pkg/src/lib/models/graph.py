import math
from enum import Enum
from typing import Dict, FrozenSet, Iterable, List, Optional, Tuple

import networkx as nx
import numpy as np
from pydantic import BaseModel, ConfigDict, PrivateAttr, field_validator, model_validator

from .errors import GraphValidationError

###########################################
# MODELS FOR THE LAYOUT PIPELINE          #
#                                         #
# Graph and geometry value types          #
###########################################

NodeId = int
Point = Tuple[float, float]
Size = Tuple[float, float]
Edge = Tuple[NodeId, NodeId]


def edge_key(u: NodeId, v: NodeId) -> Edge:
    "Canonical (smaller id first) key of an undirected edge"
    return (u, v) if u < v else (v, u)


class Graph(BaseModel):
    """
    An undirected simple graph whose nodes carry a box size (width, height).

    Dummy nodes created by planarization are listed in `dummies`; they are part of
    `nodes` but never part of an input graph.
    """

    model_config = ConfigDict(frozen=True)

    nodes: Dict[NodeId, Size]
    edges: FrozenSet[Edge] = frozenset()
    dummies: FrozenSet[NodeId] = frozenset()

    _adjacency: Dict[NodeId, FrozenSet[NodeId]] = PrivateAttr(default_factory=dict)
    _node_ids: Tuple[NodeId, ...] = PrivateAttr(default=())

    @field_validator("edges", mode="before")
    @classmethod
    def _canonical_edges(cls, edges: Iterable) -> FrozenSet[Edge]:
        return frozenset(edge_key(int(u), int(v)) for u, v in edges)

    @model_validator(mode="after")
    def _check_invariants(self) -> "Graph":
        for node, (width, height) in self.nodes.items():
            if node < 0:
                raise ValueError(f"Node ids must be non-negative, got {node}")
            if width < 0 or height < 0:
                raise ValueError(f"Node {node} has a negative box size")
        for u, v in self.edges:
            if u == v:
                raise ValueError(f"Self-loop on node {u}")
            if u not in self.nodes or v not in self.nodes:
                raise ValueError(f"Edge ({u}, {v}) references an unknown node")
        if not self.dummies <= self.nodes.keys():
            raise ValueError("Dummy nodes must be nodes of the graph")
        return self

    def model_post_init(self, __context) -> None:
        adjacency: Dict[NodeId, set] = {node: set() for node in self.nodes}
        for u, v in self.edges:
            adjacency[u].add(v)
            adjacency[v].add(u)
        self._adjacency = {node: frozenset(neighbours) for node, neighbours in adjacency.items()}
        self._node_ids = tuple(sorted(self.nodes))

    @property
    def node_ids(self) -> Tuple[NodeId, ...]:
        "Node ids in ascending order; every matrix in the pipeline is indexed this way"
        return self._node_ids

    @property
    def sorted_edges(self) -> List[Edge]:
        return sorted(self.edges)

    def neighbors(self, node: NodeId) -> FrozenSet[NodeId]:
        return self._adjacency[node]

    def degree(self, node: NodeId) -> int:
        return len(self._adjacency[node])

    def size(self, node: NodeId) -> Size:
        return self.nodes[node]

    def is_dummy(self, node: NodeId) -> bool:
        return node in self.dummies

    def to_networkx(self) -> nx.Graph:
        graph = nx.Graph()
        graph.add_nodes_from(self.node_ids)
        graph.add_edges_from(self.sorted_edges)
        return graph

    def is_connected(self) -> bool:
        return len(self.nodes) > 0 and nx.is_connected(self.to_networkx())

    def subgraph(self, nodes: Iterable[NodeId]) -> "Graph":
        "Induced subgraph on `nodes`"
        keep = set(nodes)
        return Graph(
            nodes={node: self.nodes[node] for node in sorted(keep)},
            edges=[(u, v) for u, v in self.edges if u in keep and v in keep],
            dummies=self.dummies & keep,
        )


class Stage(str, Enum):
    DISTRIBUTED = "distributed"
    ORTHOGONAL = "orthogonal"
    ATTACHED = "attached"
    REFINED = "refined"


class BoundingBox(BaseModel):
    "An axis-aligned box in layout units"

    model_config = ConfigDict(frozen=True)

    min_x: float
    min_y: float
    max_x: float
    max_y: float

    @model_validator(mode="after")
    def _check_extent(self) -> "BoundingBox":
        if self.max_x < self.min_x or self.max_y < self.min_y:
            raise ValueError("Bounding box has negative extent")
        return self

    @property
    def width(self) -> float:
        return self.max_x - self.min_x

    @property
    def height(self) -> float:
        return self.max_y - self.min_y

    @property
    def area(self) -> float:
        return self.width * self.height

    @property
    def center(self) -> Point:
        return ((self.min_x + self.max_x) / 2, (self.min_y + self.max_y) / 2)

    @property
    def aspect_ratio(self) -> float:
        "Width over height"
        if self.height == 0:
            return math.inf if self.width > 0 else 1.0
        return self.width / self.height

    def union(self, other: "BoundingBox") -> "BoundingBox":
        return BoundingBox(
            min_x=min(self.min_x, other.min_x),
            min_y=min(self.min_y, other.min_y),
            max_x=max(self.max_x, other.max_x),
            max_y=max(self.max_y, other.max_y),
        )

    def translated(self, dx: float, dy: float) -> "BoundingBox":
        return BoundingBox(min_x=self.min_x + dx, min_y=self.min_y + dy, max_x=self.max_x + dx, max_y=self.max_y + dy)

    @classmethod
    def around(cls, center: Point, size: Size) -> "BoundingBox":
        "Box of the given size centred on `center`"
        x, y = center
        width, height = size
        return cls(min_x=x - width / 2, min_y=y - height / 2, max_x=x + width / 2, max_y=y + height / 2)


class LayoutState(BaseModel):
    """
    Node centres and edge polylines of a graph at some pipeline stage.

    A route runs from the smaller endpoint id to the larger one. Edges without a
    stored route are drawn as straight segments between their endpoints.
    """

    model_config = ConfigDict(frozen=True)

    graph: Graph
    positions: Dict[NodeId, Point]
    routes: Dict[Edge, Tuple[Point, ...]] = {}
    stage: Stage = Stage.DISTRIBUTED
    baseline: bool = False

    @model_validator(mode="after")
    def _check_positions(self) -> "LayoutState":
        missing = self.graph.nodes.keys() - self.positions.keys()
        if missing:
            raise ValueError(f"Nodes without a position: {sorted(missing)}")
        unknown = self.routes.keys() - self.graph.edges
        if unknown:
            raise ValueError(f"Routes for unknown edges: {sorted(unknown)}")
        return self

    def route(self, edge: Edge) -> Tuple[Point, ...]:
        u, v = edge
        return self.routes.get(edge) or (self.positions[u], self.positions[v])

    def all_routes(self) -> Dict[Edge, Tuple[Point, ...]]:
        "Routes for every edge, straight segments filled in for missing ones"
        return {edge: self.route(edge) for edge in self.graph.sorted_edges}

    def position_array(self) -> np.ndarray:
        "Positions as an (N, 2) array in `graph.node_ids` order"
        return np.array([self.positions[node] for node in self.graph.node_ids], dtype=float).reshape(-1, 2)

    def with_array(self, coordinates: np.ndarray, stage: Optional[Stage] = None) -> "LayoutState":
        "Copy of this state with positions replaced from an (N, 2) array; routes are dropped"
        positions = {
            node: (float(x), float(y)) for node, (x, y) in zip(self.graph.node_ids, np.asarray(coordinates))
        }
        return self.model_copy(update={"positions": positions, "routes": {}, "stage": stage or self.stage})

    def node_box(self, node: NodeId) -> BoundingBox:
        return BoundingBox.around(self.positions[node], self.graph.size(node))


def bounding_box(state: LayoutState) -> BoundingBox:
    """
    Tight box around every node box and every route point of a layout.

    Args:
        state (LayoutState): The layout to measure.

    Returns:
        BoundingBox: The enclosing box.
    """
    if not state.positions:
        raise ValueError("Cannot compute the bounding box of an empty layout")
    min_x = min_y = math.inf
    max_x = max_y = -math.inf
    for node, (x, y) in state.positions.items():
        width, height = state.graph.size(node)
        min_x, max_x = min(min_x, x - width / 2), max(max_x, x + width / 2)
        min_y, max_y = min(min_y, y - height / 2), max(max_y, y + height / 2)
    for route in state.routes.values():
        for x, y in route:
            min_x, max_x = min(min_x, x), max(max_x, x)
            min_y, max_y = min(min_y, y), max(max_y, y)
    return BoundingBox(min_x=min_x, min_y=min_y, max_x=max_x, max_y=max_y)


def graph_distances(graph: Graph, ideal_edge_length: float) -> np.ndarray:
    """
    Shortest-path hop distances scaled by the ideal edge length.

    Args:
        graph (Graph): A connected graph.
        ideal_edge_length (float): Length of a single hop in layout units.

    Returns:
        np.ndarray: Symmetric (N, N) matrix in `graph.node_ids` order with a zero diagonal.
    """
    index = {node: i for i, node in enumerate(graph.node_ids)}
    n = len(index)
    distances = np.full((n, n), np.inf)
    for source, lengths in nx.all_pairs_shortest_path_length(graph.to_networkx()):
        for target, hops in lengths.items():
            distances[index[source], index[target]] = hops * ideal_edge_length
    if np.isinf(distances).any():
        unreachable = np.argwhere(np.isinf(distances))[0]
        raise GraphValidationError(
            f"Graph is disconnected: node {graph.node_ids[unreachable[0]]} "
            f"cannot reach node {graph.node_ids[unreachable[1]]}"
        )
    return distances
