import math
from itertools import combinations
from typing import Optional

import numpy as np
from loguru import logger
from scipy.spatial.distance import pdist

from lib.layout.geometry import crossing_points, route_length
from lib.models import BoundingBox, LayoutState, MetricsReport, bounding_box, graph_distances


def _clamp(value: float) -> float:
    return min(1.0, max(0.0, float(value)))


def metric_ar(state: LayoutState) -> float:
    "Bounding-box width over height"
    return bounding_box(state).aspect_ratio


def metric_ksm(state: LayoutState, distances: np.ndarray) -> float:
    """
    Kruskal stress at the optimal drawing scale, mapped to [0, 1] with 1 best.

    The drawing is scaled by the sigma minimising the squared residual against the
    graph distances, so the value does not depend on the drawing's physical size.
    """
    coordinates = state.position_array()
    if len(coordinates) < 2:
        return 1.0
    norms = pdist(coordinates)
    upper = distances[np.triu_indices(len(coordinates), k=1)]
    norm_sq = float(np.dot(norms, norms))
    if norm_sq == 0:
        return 0.0
    sigma = float(np.dot(upper, norms)) / norm_sq
    residual = float(np.sum((upper - sigma * norms) ** 2)) / float(np.dot(upper, upper))
    return _clamp(1 - math.sqrt(residual))


def metric_eld(state: LayoutState) -> float:
    "One minus the coefficient of variation of route lengths (population deviation)"
    lengths = np.array([route_length(route) for route in state.all_routes().values()])
    if len(lengths) == 0:
        return 1.0
    mean = lengths.mean()
    if mean == 0:
        return 0.0
    return _clamp(1 - min(1.0, lengths.std() / mean))


def metric_nr(state: LayoutState) -> float:
    "Smallest over largest distance between node centres"
    coordinates = state.position_array()
    if len(coordinates) < 2:
        return 1.0
    spans = pdist(coordinates)
    if spans.max() == 0:
        return 0.0
    return _clamp(spans.min() / spans.max())


def metric_nu(state: LayoutState, frame: Optional[BoundingBox] = None) -> float:
    """
    Uniformity of node centres over a k×k grid of the bounding box, k = ceil(sqrt(N)).

    Args:
        state (LayoutState): The layout.
        frame (BoundingBox, optional): Box to partition instead of the layout's own.

    Returns:
        float: 1 for equal occupancy, 0 for a degenerate box.
    """
    n = len(state.positions)
    if n < 2:
        return 1.0
    box = frame or bounding_box(state)
    if box.width == 0 or box.height == 0:
        return 0.0
    k = math.ceil(math.sqrt(n))
    counts = np.zeros((k, k))
    for x, y in state.positions.values():
        i = min(k - 1, max(0, int((x - box.min_x) / box.width * k)))
        j = min(k - 1, max(0, int((y - box.min_y) / box.height * k)))
        counts[i, j] += 1
    deviation = np.abs(counts - n / k**2).sum()
    return _clamp(1 - deviation / (2 * n * (1 - 1 / k**2)))


def metric_np(state: LayoutState, k: Optional[int] = None) -> float:
    """
    Mean Jaccard similarity between each node's graph neighbours and its nearest
    nodes in the drawing.

    Each node looks at as many nearest nodes as its degree unless `k` is given.
    Distance ties go to the smaller node id.
    """
    graph = state.graph
    nodes = graph.node_ids
    if len(nodes) < 2:
        return 1.0
    scores = []
    for node in nodes:
        x, y = state.positions[node]
        count = k if k is not None else graph.degree(node)
        ranked = sorted(
            (math.hypot(state.positions[other][0] - x, state.positions[other][1] - y), other)
            for other in nodes
            if other != node
        )
        nearest = {other for _, other in ranked[:count]}
        adjacent = set(graph.neighbors(node))
        union = nearest | adjacent
        scores.append(len(nearest & adjacent) / len(union) if union else 1.0)
    return _clamp(np.mean(scores))


def count_crossings(state: LayoutState) -> int:
    "Crossing points between routes of edges that share no endpoint"
    routes = state.all_routes()
    return sum(
        len(crossing_points(routes[a], routes[b]))
        for a, b in combinations(sorted(routes), 2)
        if not set(a) & set(b)
    )


def metric_ec(state: LayoutState) -> float:
    "One minus crossings over the number of edge pairs that could cross"
    graph = state.graph
    m = len(graph.edges)
    c_max = m * (m - 1) // 2 - sum(graph.degree(n) * (graph.degree(n) - 1) // 2 for n in graph.node_ids)
    if c_max <= 0:
        return 1.0
    return _clamp(1 - count_crossings(state) / c_max)


def report(state: LayoutState, distances: Optional[np.ndarray] = None, ideal_edge_length: float = 40.0) -> MetricsReport:
    """
    All seven quality metrics of a layout.

    Args:
        state (LayoutState): A routed layout.
        distances (np.ndarray, optional): Graph distances; computed when missing.
        ideal_edge_length (float): Hop length used when computing distances.

    Returns:
        MetricsReport: The metrics.
    """
    if distances is None:
        distances = graph_distances(state.graph, ideal_edge_length)
    metrics = MetricsReport(
        ar=metric_ar(state),
        ksm=metric_ksm(state, distances),
        eld=metric_eld(state),
        nr=metric_nr(state),
        nu=metric_nu(state),
        np=metric_np(state),
        ec=metric_ec(state),
    )
    logger.debug(f"Metrics: {metrics.model_dump()}")
    return metrics
