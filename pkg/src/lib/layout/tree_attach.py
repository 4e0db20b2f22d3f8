import math
from typing import Dict, List, Literal, Optional, Sequence, Tuple

from loguru import logger
from pydantic import BaseModel, ConfigDict

from lib.models import (
    ORIENTATIONS,
    BoundingBox,
    CostBreakdown,
    Decomposition,
    Edge,
    Graph,
    LayoutConfig,
    LayoutState,
    NodeId,
    Orientation,
    PeeledTree,
    Point,
    Stage,
    bounding_box,
    edge_key,
)

from .geometry import (
    EPSILON,
    is_axis_aligned,
    map_state,
    overlapping_pairs,
    route_hits_boxes,
    segments,
    simplify_route,
)
from .orthogonalize import PlanarizedCore, restore_chains, route_edge

Axis = Literal["x", "y"]
HalfEdge = Tuple[NodeId, NodeId]

DIRECTION_ANGLES: Dict[str, float] = {"N": math.pi / 2, "E": 0.0, "S": 3 * math.pi / 2, "W": math.pi}
CLEARANCE_ITERATIONS = 8
LOG_TOLERANCE = 1e-9
SPLIT_TOLERANCE = 1e-6


class Face(BaseModel):
    """
    A face of a crossing-free orthogonal drawing.

    `directions` lists, per boundary node, the cardinal directions that point into the
    face from that node.
    """

    model_config = ConfigDict(frozen=True)

    id: int
    boundary: Tuple[NodeId, ...]
    polygon: Tuple[Point, ...] = ()
    signed_area: float = 0.0
    is_external: bool = False
    directions: Dict[NodeId, Tuple[str, ...]] = {}


class PlacementCandidate(BaseModel):
    "Where and how a tree could hang off its root"

    model_config = ConfigDict(frozen=True)

    tree: PeeledTree
    face: Face
    orientation: Orientation
    flip: bool = False


def _angle(p: Point, q: Point) -> float:
    return math.atan2(q[1] - p[1], q[0] - p[0]) % (2 * math.pi)


def _oriented_route(state: LayoutState, a: NodeId, b: NodeId) -> Tuple[Point, ...]:
    route = state.route(edge_key(a, b))
    return route if a < b else tuple(reversed(route))


def _leaving_angle(state: LayoutState, a: NodeId, b: NodeId) -> float:
    pieces = segments(_oriented_route(state, a, b))
    if not pieces:
        return _angle(state.positions[a], state.positions[b])
    return _angle(*pieces[0])


def _shoelace(points: Sequence[Point]) -> float:
    return sum(p[0] * q[1] - q[0] * p[1] for p, q in zip(points, list(points[1:]) + [points[0]])) / 2


def enumerate_faces(state: LayoutState) -> List[Face]:
    """
    Faces of a crossing-free drawing, found by walking half-edges.

    Around every node the outgoing half-edges are ordered counter-clockwise by the
    direction of their first segment; a walk continues with the clockwise neighbour of
    the half-edge it arrived on, so each bounded face is walked counter-clockwise. The
    face with the most negative signed area is the external one.

    Args:
        state (LayoutState): A planar orthogonal layout (dummy nodes included).

    Returns:
        list[Face]: Faces numbered in discovery order.
    """
    graph = state.graph
    if not graph.edges:
        everywhere = {node: tuple(ORIENTATIONS) for node in graph.node_ids}
        return [Face(id=0, boundary=graph.node_ids, is_external=True, directions=everywhere)]

    rotation: Dict[NodeId, List[NodeId]] = {
        node: sorted(graph.neighbors(node), key=lambda n: (_leaving_angle(state, node, n), n))
        for node in graph.node_ids
    }
    position_in_rotation = {
        (node, neighbour): i for node, ring in rotation.items() for i, neighbour in enumerate(ring)
    }

    def next_half_edge(half_edge: HalfEdge) -> HalfEdge:
        u, v = half_edge
        ring = rotation[v]
        return (v, ring[(position_in_rotation[(v, u)] - 1) % len(ring)])

    walks: List[List[HalfEdge]] = []
    visited = set()
    for u, v in graph.sorted_edges:
        for start in ((u, v), (v, u)):
            if start in visited:
                continue
            walk = []
            half_edge = start
            while half_edge not in visited:
                visited.add(half_edge)
                walk.append(half_edge)
                half_edge = next_half_edge(half_edge)
            walks.append(walk)

    faces = []
    for index, walk in enumerate(walks):
        polygon: List[Point] = []
        for a, b in walk:
            polygon.extend(_oriented_route(state, a, b)[:-1])
        directions: Dict[NodeId, List[str]] = {}
        for (u, v), (_, w) in zip([walk[-1]] + walk[:-1], walk):
            start = _leaving_angle(state, v, w)
            span = (_leaving_angle(state, v, u) - start) % (2 * math.pi)
            if span == 0:
                span = 2 * math.pi
            inside = [
                name
                for name in ORIENTATIONS
                if 0 < (DIRECTION_ANGLES[name] - start) % (2 * math.pi) < span
            ]
            known = directions.setdefault(v, [])
            known.extend(d for d in inside if d not in known)
        faces.append(
            Face(
                id=index,
                boundary=tuple(a for a, _ in walk),
                polygon=tuple(polygon),
                signed_area=_shoelace(polygon) if len(polygon) >= 3 else 0.0,
                directions={node: tuple(d for d in ORIENTATIONS if d in found) for node, found in directions.items()},
            )
        )
    external = min(faces, key=lambda f: (f.signed_area, f.id)).id
    return [face.model_copy(update={"is_external": face.id == external}) for face in faces]


class _Frame:
    "Maps a tree's (lateral, depth) offsets to world coordinates for one orientation and flip"

    def __init__(self, root: Point, orientation: str, flip: bool):
        self.root = root
        self.orientation = orientation
        self.sign = -1.0 if flip else 1.0

    @property
    def depth_axis(self) -> str:
        return "y" if self.orientation in ("N", "S") else "x"

    @property
    def lateral_axis(self) -> str:
        return "x" if self.orientation in ("N", "S") else "y"

    @property
    def depth_sign(self) -> float:
        return 1.0 if self.orientation in ("N", "E") else -1.0

    def to_world(self, lateral: float, depth: float) -> Point:
        rx, ry = self.root
        a = self.sign * lateral
        if self.orientation == "N":
            return (rx + a, ry + depth)
        if self.orientation == "S":
            return (rx + a, ry - depth)
        if self.orientation == "E":
            return (rx + depth, ry + a)
        return (rx - depth, ry + a)

    def to_frame(self, point: Point) -> Point:
        "(s, t): lateral coordinate after flip and depth ahead of the root"
        dx, dy = point[0] - self.root[0], point[1] - self.root[1]
        if self.orientation == "N":
            return (dx, dy)
        if self.orientation == "S":
            return (dx, -dy)
        if self.orientation == "E":
            return (dy, dx)
        return (dy, -dx)

    def box_extent(self, box: BoundingBox) -> Tuple[float, float, float, float]:
        "(s0, s1, t0, t1) of a world box"
        a = self.to_frame((box.min_x, box.min_y))
        b = self.to_frame((box.max_x, box.max_y))
        return (min(a[0], b[0]), max(a[0], b[0]), min(a[1], b[1]), max(a[1], b[1]))

    def world_line(self, axis: str, value: float) -> float:
        "World coordinate of the frame line `s = value` or `t = value` on its world axis"
        rx, ry = self.root
        if axis == "t":
            base = ry if self.depth_axis == "y" else rx
            return base + self.depth_sign * value
        base = rx if self.lateral_axis == "x" else ry
        return base + value


def _place_tree(tree: PeeledTree, frame: _Frame) -> Dict[NodeId, Point]:
    return {node: frame.to_world(*offset) for node, offset in tree.sub_layout.items()}


def _tree_routes(tree: PeeledTree, frame: _Frame) -> Dict[Edge, Tuple[Point, ...]]:
    "Org-chart routes: drop to the middle depth, run across, drop to the child"
    routes = {}
    for parent, kids in tree.children.items():
        pa, pb = tree.sub_layout[parent]
        for kid in kids:
            ka, kb = tree.sub_layout[kid]
            if pa == ka:
                local = [(pa, pb), (ka, kb)]
            else:
                mid = (pb + kb) / 2
                local = [(pa, pb), (pa, mid), (ka, mid), (ka, kb)]
            route = simplify_route([frame.to_world(a, b) for a, b in local])
            routes[edge_key(parent, kid)] = route if parent < kid else tuple(reversed(route))
    return routes


def _footprint(tree: PeeledTree, frame: _Frame) -> Tuple[float, float, float, float]:
    "(s0, s1, t0, t1) of the placed tree's node boxes"
    placed = _place_tree(tree, frame)
    extents = [frame.box_extent(BoundingBox.around(placed[n], tree.sizes[n])) for n in placed]
    return (
        min(e[0] for e in extents),
        max(e[1] for e in extents),
        min(e[2] for e in extents),
        max(e[3] for e in extents),
    )


def _obstacles(state: LayoutState, root: NodeId, frame: _Frame) -> List[Tuple[float, float, float, float]]:
    "Frame extents of every node box and route segment, except the root and segments leaving its centre"
    extents = []
    for node in state.graph.node_ids:
        if node == root or min(state.graph.size(node)) <= 0:
            continue
        extents.append(frame.box_extent(state.node_box(node)))
    center = state.positions[root]
    for route in state.all_routes().values():
        for p, q in segments(route):
            if p == center or q == center:
                continue
            (s0, t0), (s1, t1) = frame.to_frame(p), frame.to_frame(q)
            extents.append((min(s0, s1), max(s0, s1), min(t0, t1), max(t0, t1)))
    return extents


def _candidate_frame(candidate: PlacementCandidate, state: LayoutState) -> _Frame:
    return _Frame(state.positions[candidate.tree.root], candidate.orientation, candidate.flip)


def _expansion_parts(
    candidate: PlacementCandidate, state: LayoutState, padding: float
) -> Tuple[float, float, _Frame]:
    "(depth cost, lateral cost, frame) of a candidate"
    frame = _candidate_frame(candidate, state)
    s_min, s_max, t_min, t_max = _footprint(candidate.tree, frame)
    needed_depth = (t_max - t_min) + 2 * padding
    needed_lateral = (s_max - s_min) + 2 * padding
    band = (s_min - padding, s_max + padding)

    near = math.inf
    left = right = math.inf
    for s0, s1, t0, t1 in _obstacles(state, candidate.tree.root, frame):
        in_band = s0 < band[1] and s1 > band[0]
        if in_band and t0 >= 0:
            near = min(near, t0)
            continue
        if t1 <= t_min or t0 >= t_min + needed_depth:
            continue
        if (s0 + s1) / 2 < 0:
            left = min(left, max(0.0, -s1))
        else:
            right = min(right, max(0.0, s0))

    free_depth = near - t_min
    free_lateral = 2 * min(left, right)
    return max(0.0, needed_depth - free_depth), max(0.0, needed_lateral - free_lateral), frame


def expansion_cost(candidate: PlacementCandidate, state: LayoutState, cfg: LayoutConfig) -> Tuple[float, float]:
    """
    Extra (width, height) the layout must grow by to fit a tree at a candidate.

    The tree needs its oriented bounding box plus a quarter edge length of padding on
    each side. Free depth is the distance from the back of the tree to the nearest
    obstacle ahead of the root in the tree's lateral band; free lateral room is twice
    the smaller side clearance to obstacles beside the tree's depth range.

    Returns:
        tuple[float, float]: (c_x, c_y) in layout units.
    """
    depth_cost, lateral_cost, frame = _expansion_parts(candidate, state, cfg.ideal_edge_length / 4)
    if frame.depth_axis == "x":
        return depth_cost, lateral_cost
    return lateral_cost, depth_cost


def _projected_box(candidate: PlacementCandidate, state: LayoutState, c_x: float, c_y: float) -> Tuple[float, float]:
    frame = _candidate_frame(candidate, state)
    placed = _place_tree(candidate.tree, frame)
    box = bounding_box(state)
    for node, point in placed.items():
        box = box.union(BoundingBox.around(point, candidate.tree.sizes[node]))
    return box.width + c_x, box.height + c_y


def projected_ar(
    candidate: PlacementCandidate, state: LayoutState, cfg: Optional[LayoutConfig] = None, expansion: Optional[Tuple[float, float]] = None
) -> float:
    "Width over height of the layout with the tree placed and the expansion applied"
    cfg = cfg or LayoutConfig()
    c_x, c_y = expansion if expansion is not None else expansion_cost(candidate, state, cfg)
    width, height = _projected_box(candidate, state, c_x, c_y)
    return width / height


def placement_cost(candidate: PlacementCandidate, state: LayoutState, cfg: LayoutConfig) -> CostBreakdown:
    """
    Unified cost of a candidate: expansion weighted toward the axis whose growth helps the
    aspect ratio, plus the log-squared aspect-ratio penalty scaled by the tree's leverage.

    Args:
        candidate (PlacementCandidate): The candidate to score.
        state (LayoutState): The current layout, previously attached trees included.
        cfg (LayoutConfig): Supplies the target, discount, beta and omega.

    Returns:
        CostBreakdown: Every term of the cost.
    """
    c_x, c_y = expansion_cost(candidate, state, cfg)
    ar_proj = projected_ar(candidate, state, cfg, expansion=(c_x, c_y))
    target = cfg.target_ar.value
    log_ratio = math.log(ar_proj / target)
    c_ar = log_ratio**2

    if cfg.baseline or abs(log_ratio) <= LOG_TOLERANCE:
        w_x, w_y = 1.0, 1.0
    elif ar_proj < target:
        w_x, w_y = cfg.discount, 1.0
    else:
        w_x, w_y = 1.0, cfg.discount

    if cfg.baseline:
        lam = 0.0
    else:
        core_area = bounding_box(state).area
        lam = 1.0 if core_area <= 0 else min(1.0, (candidate.tree.area / core_area) ** cfg.beta)

    c_space = w_x * c_x + w_y * c_y
    return CostBreakdown(
        c_x=c_x,
        c_y=c_y,
        w_x=w_x,
        w_y=w_y,
        c_space=c_space,
        ar_proj=ar_proj,
        c_ar=c_ar,
        lam=lam,
        omega=cfg.omega,
        c_final=c_space + lam * cfg.omega * c_ar,
    )


def enumerate_candidates(tree: PeeledTree, faces: Sequence[Face]) -> List[PlacementCandidate]:
    "Candidates in (face id, N < E < S < W, flip false < true) order"
    return [
        PlacementCandidate(tree=tree, face=face, orientation=orientation, flip=flip)
        for face in faces
        for orientation in face.directions.get(tree.root, ())
        for flip in (False, True)
    ]


def apply_expansion(state: LayoutState, axis: Axis, line: float, amount: float, direction: int = 1) -> LayoutState:
    """
    Open up space by translating everything strictly beyond `line` on `axis`.

    With `direction` 1 coordinates above the line grow by `amount`; with -1 coordinates
    below it shrink by `amount`. Route points move with the same map, so axis-aligned
    segments stay axis-aligned and node boxes stay disjoint. Routes that cross the line
    are then re-routed with the L/Z router when it finds a clear route; pieces ending at
    a dummy node are only stretched, so dummies stay on their crossings.
    """
    if amount <= 0:
        return state
    if direction > 0:
        shift = lambda c: c + amount if c > line + EPSILON else c
    else:
        shift = lambda c: c - amount if c < line - EPSILON else c
    identity = lambda c: c
    index = 0 if axis == "x" else 1
    crossing = [
        edge
        for edge, route in state.routes.items()
        if not (set(edge) & state.graph.dummies)
        and min(p[index] for p in route) < line - EPSILON
        and max(p[index] for p in route) > line + EPSILON
    ]
    expanded = map_state(state, shift, identity) if axis == "x" else map_state(state, identity, shift)
    if not crossing:
        return expanded
    routes = dict(expanded.routes)
    for edge in crossing:
        route, clear = route_edge(expanded, edge)
        if clear:
            routes[edge] = route
    return expanded.model_copy(update={"routes": routes})


def _expand_frame(state: LayoutState, frame: _Frame, axis: str, value: float, amount: float, side: int) -> LayoutState:
    "Expansion expressed in a tree frame: push everything beyond `axis = value` further along `side`"
    world_axis = frame.depth_axis if axis == "t" else frame.lateral_axis
    line = frame.world_line(axis, value)
    direction = side * int(frame.depth_sign) if axis == "t" else side
    return apply_expansion(state, world_axis, line, amount, direction)


def _make_room(state: LayoutState, tree: PeeledTree, frame: _Frame, padding: float) -> Tuple[LayoutState, bool]:
    """
    Push obstacles out of the tree's padded footprint; returns the state and whether it is clear.

    Obstacles ahead of the root are pushed along the growth direction, obstacles beside
    it sideways. Anything straddling the root's own axis behind its front cannot be
    moved away and is left in place.
    """
    root = tree.root
    for _ in range(CLEARANCE_ITERATIONS):
        s_min, s_max, t_min, t_max = _footprint(tree, frame)
        root_front = -t_min
        blocking = [
            (s0, s1, t0, t1)
            for s0, s1, t0, t1 in _obstacles(state, root, frame)
            if s0 < s_max + padding - EPSILON
            and s1 > s_min - padding + EPSILON
            and t0 < t_max + padding - EPSILON
            and t1 > t_min + EPSILON
        ]
        ahead = [b for b in blocking if b[2] >= root_front - EPSILON]
        right = [b for b in blocking if b not in ahead and b[0] > EPSILON]
        left = [b for b in blocking if b not in ahead and b[1] < -EPSILON]
        if not (ahead or right or left):
            return state, len(blocking) == 0
        if ahead:
            amount = t_max + padding - min(b[2] for b in ahead)
            state = _expand_frame(state, frame, "t", root_front / 2, amount, 1)
        if right:
            state = _expand_frame(state, frame, "s", 0.0, s_max + padding - min(b[0] for b in right), 1)
        if left:
            state = _expand_frame(state, frame, "s", 0.0, max(b[1] for b in left) - (s_min - padding), -1)
    return state, False


def _apply_candidate(state: LayoutState, candidate: PlacementCandidate, cfg: LayoutConfig) -> Tuple[LayoutState, bool]:
    padding = cfg.ideal_edge_length / 4
    depth_cost, lateral_cost, frame = _expansion_parts(candidate, state, padding)
    _, _, t_min, _ = _footprint(candidate.tree, frame)
    state = _expand_frame(state, frame, "t", -t_min / 2, depth_cost, 1)
    state = _expand_frame(state, frame, "s", 0.0, lateral_cost / 2, 1)
    state = _expand_frame(state, frame, "s", 0.0, lateral_cost / 2, -1)
    frame = _candidate_frame(candidate, state)
    state, clear = _make_room(state, candidate.tree, frame, padding)
    frame = _candidate_frame(candidate, state)

    tree = candidate.tree
    nodes = dict(state.graph.nodes)
    nodes.update({node: tree.sizes[node] for node in tree.nodes})
    positions = dict(state.positions)
    positions.update({node: point for node, point in _place_tree(tree, frame).items() if node != tree.root})
    routes = dict(state.routes)
    routes.update(_tree_routes(tree, frame))
    graph = Graph(
        nodes=dict(sorted(nodes.items())), edges=state.graph.edges | tree.edges, dummies=state.graph.dummies
    )
    return LayoutState(graph=graph, positions=positions, routes=routes, stage=state.stage, baseline=state.baseline), clear


def _fallback_candidate(tree: PeeledTree, state: LayoutState, cfg: LayoutConfig) -> PlacementCandidate:
    "External-face placement on the side that brings the aspect ratio closest to the target"
    face = Face(id=-1, boundary=(tree.root,), is_external=True, directions={tree.root: tuple(ORIENTATIONS)})
    options = enumerate_candidates(tree, [face])
    return min(
        options,
        key=lambda c: abs(math.log(projected_ar(c, state, cfg, expansion=(0.0, 0.0)) / cfg.target_ar.value)),
    )


def remove_dummies(state: LayoutState, planar: PlanarizedCore, graph: Graph) -> LayoutState:
    "Drop planarization dummies, joining each original edge's pieces back into one route"
    routes = {edge: route for edge, route in state.routes.items() if edge in graph.edges}
    routes.update(restore_chains(state, planar))
    positions = {node: state.positions[node] for node in graph.node_ids}
    return LayoutState(graph=graph, positions=positions, routes=routes, stage=state.stage, baseline=state.baseline)


def attach_trees(
    decomposition: Decomposition,
    core: LayoutState,
    planar: PlanarizedCore,
    cfg: LayoutConfig,
    placements: Optional[List[dict]] = None,
) -> LayoutState:
    """
    Greedily hang every peeled tree off its root at the cheapest candidate.

    Trees go largest first (ties by root id). Each tree re-reads the faces and the
    bounding box left by the trees before it. Dummy nodes are removed at the end.

    Args:
        decomposition (Decomposition): Core and laid-out trees.
        core (LayoutState): The routed orthogonal core.
        planar (PlanarizedCore): Its planarization.
        cfg (LayoutConfig): The layout config.
        placements (list, optional): Receives one record per scored candidate.

    Raises:
        ValueError: When a dummy node id is also the id of a tree node.

    Returns:
        LayoutState: The full graph, stage "attached".
    """
    tree_nodes = set().union(*(tree.nodes for tree in decomposition.trees))
    clashes = sorted(tree_nodes & set(planar.crossings))
    if clashes:
        raise ValueError(f"Dummy nodes {clashes} reuse tree node ids; planarize with ids beyond the full graph")

    state = planar.state.model_copy(update={"stage": Stage.ATTACHED})
    fallbacks = blocked = 0
    for tree in sorted(decomposition.trees, key=lambda t: (-t.area, t.root)):
        candidates = enumerate_candidates(tree, enumerate_faces(state))
        scored = [(placement_cost(c, state, cfg), i, c) for i, c in enumerate(candidates)]
        if scored:
            cost, _, chosen = min(scored, key=lambda item: (item[0].c_final, item[1]))
        else:
            fallbacks += 1
            chosen = _fallback_candidate(tree, state, cfg)
            cost = placement_cost(chosen, state, cfg)
            scored = [(cost, 0, chosen)]
        if placements is not None:
            placements.extend(
                {
                    "root": tree.root,
                    "tree_nodes": len(tree.nodes),
                    "face": c.face.id,
                    "external": c.face.is_external,
                    "orientation": c.orientation,
                    "flip": c.flip,
                    "chosen": c is chosen,
                    **breakdown.model_dump(),
                }
                for breakdown, _, c in scored
            )
        logger.debug(
            f"Tree at {tree.root} ({len(tree.nodes)} nodes): {chosen.orientation}"
            f"{' flipped' if chosen.flip else ''} in face {chosen.face.id}, cost {cost.c_final:.3f}"
        )
        state, clear = _apply_candidate(state, chosen, cfg)
        blocked += not clear

    if fallbacks:
        logger.warning(f"{fallbacks} trees had no face candidate and used the external-face fallback")
    if blocked:
        logger.warning(f"{blocked} trees could not be fully cleared of obstacles")

    original = decomposition.recombine()
    result = remove_dummies(state, planar, original)
    logger.info(f"Attached {len(decomposition.trees)} trees")
    return result


def _compaction_map(intervals: List[Tuple[float, float]], limit: float):
    "Monotone map closing every uncovered stretch longer than `limit` down to `limit`"
    merged: List[List[float]] = []
    for lo, hi in sorted(intervals):
        if merged and lo <= merged[-1][1]:
            merged[-1][1] = max(merged[-1][1], hi)
        else:
            merged.append([lo, hi])
    gaps = [(a[1], b[0]) for a, b in zip(merged, merged[1:]) if b[0] - a[1] > limit]
    if not gaps:
        return None

    def compact(c: float) -> float:
        shift = 0.0
        for start, end in gaps:
            length = end - start
            if c >= end:
                shift += length - limit
            elif c > start:
                return c - shift - (c - start) * (1 - limit / length)
        return c - shift

    return compact


def _separate_boxes(state: LayoutState) -> LayoutState:
    """
    Push overlapping node boxes apart, one pair at a time, by expanding along the axis
    of least penetration at the midline between their centres.

    Expansions only stretch, so no new overlap appears. Pairs with coincident centres
    cannot be split by a line and are left in place.
    """
    for _ in range(len(state.graph.nodes) ** 2):
        pairs = overlapping_pairs(state)
        if not pairs:
            break
        splittable = []
        for u, v in pairs:
            (ux, uy), (vx, vy) = state.positions[u], state.positions[v]
            (uw, uh), (vw, vh) = state.graph.size(u), state.graph.size(v)
            if abs(vx - ux) > SPLIT_TOLERANCE:
                splittable.append(((uw + vw) / 2 - abs(vx - ux), "x", (ux + vx) / 2))
            if abs(vy - uy) > SPLIT_TOLERANCE:
                splittable.append(((uh + vh) / 2 - abs(vy - uy), "y", (uy + vy) / 2))
        if not splittable:
            break
        penetration, axis, line = min(splittable)
        state = apply_expansion(state, axis, line, penetration)
    return state


def compact_and_route(state: LayoutState, cfg: Optional[LayoutConfig] = None) -> LayoutState:
    """
    Close empty stretches wider than the ideal edge length, one axis at a time, then
    re-route every edge with the L/Z router.

    Node boxes move rigidly; everything inside a closed stretch is squeezed
    proportionally. Node overlaps left by attachment are pushed apart before routing.
    An edge keeps its previous route only when no candidate is clear and the previous
    route passes through fewer foreign boxes.
    """
    cfg = cfg or LayoutConfig()
    limit = cfg.ideal_edge_length
    boxes = [state.node_box(n) for n in state.graph.node_ids]
    x_map = _compaction_map([(b.min_x, b.max_x) for b in boxes], limit)
    if x_map is not None:
        state = map_state(state, x_map, lambda y: y)
    boxes = [state.node_box(n) for n in state.graph.node_ids]
    y_map = _compaction_map([(b.min_y, b.max_y) for b in boxes], limit)
    if y_map is not None:
        state = map_state(state, lambda x: x, y_map)
    state = _separate_boxes(state)

    routes = {}
    residual = 0
    for edge in state.graph.sorted_edges:
        route, clear = route_edge(state, edge)
        if not clear:
            residual += 1
            foreign = [
                state.node_box(n) for n in state.graph.node_ids if n not in edge and min(state.graph.size(n)) > 0
            ]
            previous = state.route(edge)
            if is_axis_aligned(previous) and route_hits_boxes(previous, foreign) < route_hits_boxes(route, foreign):
                route = previous
        routes[edge] = route
    if residual:
        logger.warning(f"{residual} edges still pass through foreign node boxes")
    overlaps = len(overlapping_pairs(state))
    if overlaps:
        logger.warning(f"{overlaps} overlapping node pairs after compaction")
    return state.model_copy(update={"routes": routes})
