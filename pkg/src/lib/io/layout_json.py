import json
from typing import Dict, List, Optional, Tuple, Union

from pydantic import BaseModel, ValidationError

from lib.models import Graph, GraphParseError, LayoutConfig, LayoutState, RefineReport, Stage

from .graph_formats import GraphDocument


class LayoutDocument(BaseModel):
    "A serialized layout together with the graph and config that produced it"

    config: Optional[LayoutConfig] = None
    graph: GraphDocument
    positions: Dict[int, Tuple[float, float]]
    routes: List[List[Tuple[float, float]]]
    stage: Stage
    baseline: bool = False
    refine: Optional[RefineReport] = None

    def to_graph(self) -> Graph:
        return Graph(
            nodes={node.id: (node.w or 0.0, node.h or 0.0) for node in self.graph.nodes},
            edges=self.graph.edges,
        )

    def to_state(self) -> LayoutState:
        graph = self.to_graph()
        edges = graph.sorted_edges
        if len(edges) != len(self.routes):
            raise GraphParseError(f"Layout has {len(self.routes)} routes for {len(edges)} edges")
        return LayoutState(
            graph=graph,
            positions=self.positions,
            routes={edge: tuple(route) for edge, route in zip(edges, self.routes)},
            stage=self.stage,
            baseline=self.baseline,
        )


def serialize_layout(
    state: LayoutState, config: Optional[LayoutConfig] = None, refine: Optional[RefineReport] = None
) -> bytes:
    """
    Write a layout as JSON.

    Routes are listed in ascending edge order; edges without a stored route are
    written as the straight pair of their endpoints. Floats keep their shortest
    exact representation, so serializing a parsed layout reproduces the bytes.
    """
    document = {
        "config": config.model_dump(mode="json") if config is not None else None,
        "graph": GraphDocument.from_graph(state.graph).model_dump(mode="json"),
        "positions": {str(node): [float(c) for c in state.positions[node]] for node in state.graph.node_ids},
        "routes": [[[float(x), float(y)] for x, y in route] for route in state.all_routes().values()],
        "stage": state.stage.value,
        "baseline": state.baseline,
        "refine": refine.model_dump(mode="json") if refine is not None else None,
    }
    return json.dumps(document, indent=2).encode("utf-8")


def parse_layout(data: Union[bytes, str]) -> LayoutDocument:
    try:
        return LayoutDocument.model_validate_json(data)
    except ValidationError as e:
        raise GraphParseError(f"Malformed layout JSON: {e.errors()[0]['msg']}") from e


def serialize_placements(placements: List[dict]) -> bytes:
    "Scored tree placements as a JSON list, one object per candidate with its cost breakdown"
    return json.dumps(placements, indent=2).encode("utf-8")
