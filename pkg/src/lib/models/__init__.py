from .config import AspectRatioTarget, LayoutConfig
from .errors import GraphParseError, GraphValidationError
from .graph import (
    BoundingBox,
    Edge,
    Graph,
    LayoutState,
    NodeId,
    Point,
    Size,
    Stage,
    bounding_box,
    edge_key,
    graph_distances,
)
from .reports import ORIENTATIONS, CostBreakdown, MetricsReport, Orientation, RefineReport
from .trees import Decomposition, PeeledTree

__all__ = [
    "AspectRatioTarget",
    "LayoutConfig",
    "GraphParseError",
    "GraphValidationError",
    "BoundingBox",
    "Edge",
    "Graph",
    "LayoutState",
    "NodeId",
    "Point",
    "Size",
    "Stage",
    "bounding_box",
    "edge_key",
    "graph_distances",
    "ORIENTATIONS",
    "CostBreakdown",
    "MetricsReport",
    "Orientation",
    "RefineReport",
    "Decomposition",
    "PeeledTree",
]
