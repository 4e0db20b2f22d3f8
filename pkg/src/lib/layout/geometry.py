import math
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from more_itertools import pairwise

from lib.models import BoundingBox, Edge, LayoutState, NodeId, Point

Segment = Tuple[Point, Point]

EPSILON = 1e-9


def segments(route: Sequence[Point]) -> List[Segment]:
    "Consecutive point pairs of a polyline, zero-length pieces dropped"
    return [(p, q) for p, q in pairwise(route) if p != q]


def is_horizontal(segment: Segment) -> bool:
    return segment[0][1] == segment[1][1]


def is_vertical(segment: Segment) -> bool:
    return segment[0][0] == segment[1][0]


def is_axis_aligned(route: Sequence[Point]) -> bool:
    return all(is_horizontal(s) or is_vertical(s) for s in segments(route))


def route_length(route: Sequence[Point]) -> float:
    return sum(math.hypot(q[0] - p[0], q[1] - p[1]) for p, q in pairwise(route))


def bends(route: Sequence[Point]) -> int:
    return max(0, len(simplify_route(route)) - 2)


def simplify_route(route: Sequence[Point]) -> Tuple[Point, ...]:
    "Drop repeated points and interior points lying on a straight axis-aligned run"
    points: List[Point] = []
    for point in route:
        if points and points[-1] == point:
            continue
        if len(points) >= 2:
            a, b = points[-2], points[-1]
            if (a[0] == b[0] == point[0]) or (a[1] == b[1] == point[1]):
                points[-1] = point
                continue
        points.append(point)
    if len(points) == 1:
        points.append(points[0])
    return tuple(points)


def _orientation(p: Point, q: Point, r: Point) -> int:
    "0 if colinear, 1 if clockwise, -1 if counterclockwise"
    val = (q[1] - p[1]) * (r[0] - q[0]) - (q[0] - p[0]) * (r[1] - q[1])
    if abs(val) < EPSILON:
        return 0
    return 1 if val > 0 else -1


def segment_intersection(s1: Segment, s2: Segment) -> Optional[Point]:
    """
    The single point two segments share, or None.

    Perpendicular axis-aligned pairs are compared exactly; other pairs use the
    orientation test. Collinear overlaps are not point intersections and give None.
    """
    (p1, q1), (p2, q2) = s1, s2
    h1, v1, h2, v2 = is_horizontal(s1), is_vertical(s1), is_horizontal(s2), is_vertical(s2)
    if (h1 and v2 and not v1) or (v1 and h2 and not h1):
        horizontal, vertical = (s1, s2) if h1 else (s2, s1)
        (hx1, hy), (hx2, _) = horizontal
        (vx, vy1), (_, vy2) = vertical
        if min(hx1, hx2) <= vx <= max(hx1, hx2) and min(vy1, vy2) <= hy <= max(vy1, vy2):
            return (vx, hy)
        return None

    o1 = _orientation(p1, q1, p2)
    o2 = _orientation(p1, q1, q2)
    o3 = _orientation(p2, q2, p1)
    o4 = _orientation(p2, q2, q1)
    if o1 == o2 == o3 == o4 == 0:
        return None
    if o1 != o2 and o3 != o4:
        if o1 == 0:
            return p2
        if o2 == 0:
            return q2
        if o3 == 0:
            return p1
        if o4 == 0:
            return q1
        x1, y1 = p1
        x2, y2 = q1
        x3, y3 = p2
        x4, y4 = q2
        denom = (x1 - x2) * (y3 - y4) - (y1 - y2) * (x3 - x4)
        px = ((x1 * y2 - y1 * x2) * (x3 - x4) - (x1 - x2) * (x3 * y4 - y3 * x4)) / denom
        py = ((x1 * y2 - y1 * x2) * (y3 - y4) - (y1 - y2) * (x3 * y4 - y3 * x4)) / denom
        return (px, py)
    return None


def crossing_points(route_a: Sequence[Point], route_b: Sequence[Point]) -> List[Point]:
    """
    Distinct points where two routes meet, excluding the terminal points of either route.

    Shared endpoints of adjacent edges are therefore never crossings.
    """
    terminals = {route_a[0], route_a[-1], route_b[0], route_b[-1]}
    found = []
    for s1 in segments(route_a):
        for s2 in segments(route_b):
            point = segment_intersection(s1, s2)
            if point is not None and point not in terminals and point not in found:
                found.append(point)
    return found


def collinear_overlap(s1: Segment, s2: Segment) -> bool:
    "True when two axis-aligned segments run along the same line and share more than a point"
    if is_horizontal(s1) and is_horizontal(s2) and s1[0][1] == s2[0][1]:
        lo1, hi1 = sorted((s1[0][0], s1[1][0]))
        lo2, hi2 = sorted((s2[0][0], s2[1][0]))
    elif is_vertical(s1) and is_vertical(s2) and s1[0][0] == s2[0][0]:
        lo1, hi1 = sorted((s1[0][1], s1[1][1]))
        lo2, hi2 = sorted((s2[0][1], s2[1][1]))
    else:
        return False
    return min(hi1, hi2) - max(lo1, lo2) > EPSILON


def boxes_overlap(a: BoundingBox, b: BoundingBox, eps: float = EPSILON) -> bool:
    "Strict overlap with positive area; touching boxes do not overlap"
    return (
        a.min_x < b.max_x - eps and b.min_x < a.max_x - eps and a.min_y < b.max_y - eps and b.min_y < a.max_y - eps
    )


def overlapping_pairs(state: LayoutState, eps: float = EPSILON) -> List[Tuple[NodeId, NodeId]]:
    "Brute-force list of node pairs whose boxes overlap; zero-size nodes never overlap"
    nodes = [n for n in state.graph.node_ids if min(state.graph.size(n)) > 0]
    boxes = {n: state.node_box(n) for n in nodes}
    return [
        (u, v) for i, u in enumerate(nodes) for v in nodes[i + 1 :] if boxes_overlap(boxes[u], boxes[v], eps)
    ]


def segment_hits_box(segment: Segment, box: BoundingBox, eps: float = EPSILON) -> bool:
    "Whether an axis-aligned segment passes through the interior of a box"
    (x1, y1), (x2, y2) = segment
    lo_x, hi_x = sorted((x1, x2))
    lo_y, hi_y = sorted((y1, y2))
    return lo_x < box.max_x - eps and hi_x > box.min_x + eps and lo_y < box.max_y - eps and hi_y > box.min_y + eps


def route_hits_boxes(route: Sequence[Point], boxes: Iterable[BoundingBox]) -> int:
    "Number of boxes whose interior a route passes through"
    pieces = segments(route)
    return sum(1 for box in boxes if any(segment_hits_box(s, box) for s in pieces))


def map_state(state: LayoutState, fx, fy) -> LayoutState:
    "Apply per-axis coordinate maps to every node centre and route point"
    positions = {node: (fx(x), fy(y)) for node, (x, y) in state.positions.items()}
    routes: Dict[Edge, Tuple[Point, ...]] = {
        edge: tuple((fx(x), fy(y)) for x, y in route) for edge, route in state.routes.items()
    }
    return state.model_copy(update={"positions": positions, "routes": routes})


def scale_about(state: LayoutState, s_x: float, s_y: float, center: Point) -> LayoutState:
    "Anisotropic scale of positions and routes about `center`; node boxes keep their size"
    cx, cy = center
    return map_state(state, lambda x: cx + s_x * (x - cx), lambda y: cy + s_y * (y - cy))
