import math
from typing import Dict, List, Optional, Sequence, Set, Tuple

import numpy as np
from loguru import logger
from pydantic import BaseModel, ConfigDict

from lib.models import Edge, Graph, LayoutConfig, LayoutState, NodeId, Point, Stage, bounding_box, edge_key

from .distribution import _normalize, _variance_floor
from .geometry import (
    collinear_overlap,
    crossing_points,
    route_hits_boxes,
    route_length,
    segments,
    simplify_route,
)

Cell = Tuple[int, int]

AR_DRIFT_LIMIT = 1.35
COLLINEAR_SHIFT_PASSES = 32


class GridLayout(BaseModel):
    "Integer grid coordinates of every node; world position = origin + grid * cell"

    model_config = ConfigDict(frozen=True)

    cell: float
    origin: Point = (0.0, 0.0)
    positions: Dict[NodeId, Cell]

    def world(self, node: NodeId) -> Point:
        gx, gy = self.positions[node]
        return (self.origin[0] + gx * self.cell, self.origin[1] + gy * self.cell)

    def world_positions(self) -> Dict[NodeId, Point]:
        return {node: self.world(node) for node in sorted(self.positions)}


class PlanarizedCore(BaseModel):
    """
    A crossing-free version of a routed core.

    Every crossing point carries a dummy node that splits the crossing edges; `chains`
    gives, per original edge, the node sequence its route now runs through.
    """

    model_config = ConfigDict(frozen=True)

    state: LayoutState
    crossings: Dict[NodeId, Tuple[Edge, ...]] = {}
    chains: Dict[Edge, Tuple[NodeId, ...]] = {}
    grid: Optional[GridLayout] = None

    @property
    def dummies(self) -> Tuple[NodeId, ...]:
        return tuple(sorted(self.crossings))


def grid_pitch(graph: Graph, ideal_edge_length: float) -> float:
    "Grid cell side: the ideal edge length, widened when boxes would not leave a quarter of it free"
    largest = max((max(size) for size in graph.nodes.values()), default=0.0)
    return max(ideal_edge_length, largest + ideal_edge_length / 4)


def _spiral_offsets(radius: int) -> List[Cell]:
    "Offsets within Euclidean `radius`, ordered by (distance, angle in [0, 2pi))"
    offsets = [
        (dx, dy)
        for dx in range(-radius, radius + 1)
        for dy in range(-radius, radius + 1)
        if (dx, dy) != (0, 0) and dx * dx + dy * dy <= radius * radius
    ]
    return sorted(offsets, key=lambda o: (o[0] ** 2 + o[1] ** 2, math.atan2(o[1], o[0]) % (2 * math.pi)))


def snap_to_grid(state: LayoutState, cell: float) -> GridLayout:
    """
    Move every node to the nearest free grid cell.

    Nodes are processed by id; a node whose rounded cell is taken searches outward in a
    spiral, nearest cells first and counter-clockwise from east among equally near ones.

    Args:
        state (LayoutState): An overlap-free layout.
        cell (float): Grid pitch in layout units.

    Returns:
        GridLayout: Collision-free integer positions.
    """
    occupied: Set[Cell] = set()
    positions: Dict[NodeId, Cell] = {}
    offsets = _spiral_offsets(math.ceil(math.sqrt(len(state.positions))) + 1)
    for node in state.graph.node_ids:
        x, y = state.positions[node]
        rounded = (math.floor(x / cell + 0.5), math.floor(y / cell + 0.5))
        target = rounded
        if target in occupied:
            target = next(
                (rounded[0] + dx, rounded[1] + dy)
                for dx, dy in offsets
                if (rounded[0] + dx, rounded[1] + dy) not in occupied
            )
        occupied.add(target)
        positions[node] = target
    return GridLayout(cell=cell, positions=positions)


def align_neighbors(grid: GridLayout, graph: Graph) -> GridLayout:
    """
    Greedily straighten edges whose endpoints are one cell apart on one axis.

    Edges are visited in ascending order; the higher-id endpoint moves onto the other's
    row (or column) when that cell is free, otherwise the lower-id endpoint tries.
    """
    positions = dict(grid.positions)
    occupied = set(positions.values())

    def move(node: NodeId, cell: Cell) -> bool:
        if cell in occupied:
            return False
        occupied.discard(positions[node])
        occupied.add(cell)
        positions[node] = cell
        return True

    for u, v in graph.sorted_edges:
        (ux, uy), (vx, vy) = positions[u], positions[v]
        if abs(vy - uy) == 1 and vx != ux:
            move(v, (vx, uy)) or move(u, (ux, vy))
        elif abs(vx - ux) == 1 and vy != uy:
            move(v, (ux, vy)) or move(u, (vx, uy))
    return grid.model_copy(update={"positions": positions})


def _candidate_routes(pu: Point, pv: Point) -> List[Tuple[Point, ...]]:
    (xu, yu), (xv, yv) = pu, pv
    if xu == xv or yu == yv:
        return [(pu, pv)]
    xm, ym = (xu + xv) / 2, (yu + yv) / 2
    return [
        (pu, (xv, yu), pv),
        (pu, (xu, yv), pv),
        (pu, (xm, yu), (xm, yv), pv),
        (pu, (xu, ym), (xv, ym), pv),
    ]


def route_edge(state: LayoutState, edge: Edge, positions: Optional[Dict[NodeId, Point]] = None) -> Tuple[Tuple[Point, ...], bool]:
    """
    Orthogonal route for one edge: straight, else an L (one bend), else a Z through the midline.

    The first candidate whose segments stay clear of every other node box wins. When
    none is clear, the candidate hitting the fewest boxes is returned with `False`.
    """
    positions = positions or state.positions
    u, v = edge
    boxes = [state.node_box(n) for n in state.graph.node_ids if n not in edge and min(state.graph.size(n)) > 0]
    candidates = _candidate_routes(positions[u], positions[v])
    hits = [route_hits_boxes(route, boxes) for route in candidates]
    for route, count in zip(candidates, hits):
        if count == 0:
            return route, True
    best = min(range(len(candidates)), key=lambda i: (hits[i], i))
    return candidates[best], False


def route_orthogonal(grid: GridLayout, graph: Graph, baseline: bool = False) -> LayoutState:
    """
    Place nodes at their grid cells and route every edge orthogonally.

    Node-edge overlaps that no candidate route avoids are kept and counted.
    """
    state = LayoutState(
        graph=graph, positions=grid.world_positions(), stage=Stage.ORTHOGONAL, baseline=baseline
    )
    routes = {}
    blocked = 0
    for edge in graph.sorted_edges:
        routes[edge], clear = route_edge(state, edge)
        blocked += not clear
    if blocked:
        logger.warning(f"{blocked} edges could not avoid foreign node boxes")
    return state.model_copy(update={"routes": routes})


def _shift_segment(route: Tuple[Point, ...], index: int, offset: float) -> Tuple[Point, ...]:
    "Move segment `index` of a route sideways by `offset`, joined to its ends with stubs"
    pieces = segments(route)
    p, q = pieces[index]
    if p[1] == q[1]:
        shifted = [(p[0], p[1] + offset), (q[0], q[1] + offset)]
    else:
        shifted = [(p[0] + offset, p[1]), (q[0] + offset, q[1])]
    points: List[Point] = [pieces[0][0]]
    for i, (a, b) in enumerate(pieces):
        if i == index:
            points.extend(shifted)
        points.append(b)
    return tuple(points)


def _collinear_count(route: Tuple[Point, ...], others: List[Tuple[Point, ...]]) -> int:
    return sum(
        1 for other in others for s1 in segments(other) for s2 in segments(route) if collinear_overlap(s1, s2)
    )


def _shift_clear_of(
    state: LayoutState, routes: Dict[Edge, Tuple[Point, ...]], edge: Edge, index: int, offset: float
) -> Tuple[Point, ...]:
    "Shift a segment one grid line to whichever side hits fewer foreign boxes and overlaps, positive side on ties"
    foreign = [
        state.node_box(n) for n in state.graph.node_ids if n not in edge and min(state.graph.size(n)) > 0
    ]
    others = [route for other, route in routes.items() if other != edge]
    options = [_shift_segment(routes[edge], index, d) for d in (offset, -offset)]
    return min(options, key=lambda r: (route_hits_boxes(r, foreign), _collinear_count(r, others)))


def _separate_collinear(
    state: LayoutState, routes: Dict[Edge, Tuple[Point, ...]], offset: float
) -> Dict[Edge, Tuple[Point, ...]]:
    "Shift the later edge of every collinear overlap onto a neighbouring grid line until none is left"
    routes = dict(routes)
    edges = sorted(routes)
    for _ in range(COLLINEAR_SHIFT_PASSES):
        changed = False
        for i, first in enumerate(edges):
            for second in edges[i + 1 :]:
                for k, s2 in enumerate(segments(routes[second])):
                    if any(collinear_overlap(s1, s2) for s1 in segments(routes[first])):
                        routes[second] = _shift_clear_of(state, routes, second, k, offset)
                        changed = True
                        break
        if not changed:
            return routes
    logger.warning("Collinear edge overlaps remain after shifting")
    return routes


def _arc_position(route: Sequence[Point], point: Point) -> float:
    "Arc length from the start of a route to a point lying on it"
    travelled = 0.0
    for p, q in segments(route):
        lo_x, hi_x = sorted((p[0], q[0]))
        lo_y, hi_y = sorted((p[1], q[1]))
        if lo_x - 1e-9 <= point[0] <= hi_x + 1e-9 and lo_y - 1e-9 <= point[1] <= hi_y + 1e-9:
            return travelled + math.hypot(point[0] - p[0], point[1] - p[1])
        travelled += math.hypot(q[0] - p[0], q[1] - p[1])
    return travelled


def _split_route(route: Sequence[Point], cuts: Sequence[Point]) -> List[Tuple[Point, ...]]:
    "Cut a route at points lying on it, in order along the route"
    pieces: List[Tuple[Point, ...]] = []
    current: List[Point] = [route[0]]
    remaining = sorted(cuts, key=lambda c: _arc_position(route, c))
    for p, q in segments(route):
        on_segment = [
            c for c in remaining
            if min(p[0], q[0]) - 1e-9 <= c[0] <= max(p[0], q[0]) + 1e-9
            and min(p[1], q[1]) - 1e-9 <= c[1] <= max(p[1], q[1]) + 1e-9
        ]
        for c in sorted(on_segment, key=lambda c: math.hypot(c[0] - p[0], c[1] - p[1])):
            current.append(c)
            pieces.append(simplify_route(current))
            current = [c]
            remaining.remove(c)
        current.append(q)
    pieces.append(simplify_route(current))
    return pieces


def _midpoint(route: Sequence[Point]) -> Point:
    half = route_length(route) / 2
    travelled = 0.0
    for p, q in segments(route):
        length = math.hypot(q[0] - p[0], q[1] - p[1])
        if travelled + length >= half:
            t = (half - travelled) / length
            return (p[0] + t * (q[0] - p[0]), p[1] + t * (q[1] - p[1]))
        travelled += length
    return route[0]


def planarize(state: LayoutState, cell: Optional[float] = None, first_dummy_id: Optional[NodeId] = None) -> PlanarizedCore:
    """
    Insert a dummy node at every point where two routes meet.

    Collinear overlapping segments are first moved onto a neighbouring grid line.
    Each crossing splits both edges.

    Args:
        state (LayoutState): A routed orthogonal layout.
        cell (float, optional): Grid pitch; defaults to the pitch implied by the graph.
        first_dummy_id (int, optional): Id of the first dummy node. A core drawn without
            its peeled trees must pass an id beyond every node of the full graph;
            defaults to one past the largest id in `state`.

    Raises:
        ValueError: When `first_dummy_id` is not beyond every node id in `state`.

    Returns:
        PlanarizedCore: The crossing-free drawing with its dummy bookkeeping.
    """
    graph = state.graph
    if first_dummy_id is None:
        first_dummy_id = max(graph.node_ids) + 1
    elif first_dummy_id <= max(graph.node_ids):
        raise ValueError(f"Dummy ids must start beyond node {max(graph.node_ids)}, got {first_dummy_id}")
    cell = cell or grid_pitch(graph, 40.0)
    routes = _separate_collinear(state, state.all_routes(), cell)
    routes = {edge: simplify_route(route) for edge, route in routes.items()}

    edges = graph.sorted_edges
    point_edges: Dict[Point, List[Edge]] = {}
    for i, first in enumerate(edges):
        for second in edges[i + 1 :]:
            for point in crossing_points(routes[first], routes[second]):
                members = point_edges.setdefault(point, [])
                for edge in (first, second):
                    if edge not in members:
                        members.append(edge)

    next_id = first_dummy_id
    dummy_at: Dict[Point, NodeId] = {}
    crossings: Dict[NodeId, Tuple[Edge, ...]] = {}
    for point, members in point_edges.items():
        dummy_at[point] = next_id
        crossings[next_id] = tuple(sorted(members))
        next_id += 1

    nodes = dict(graph.nodes)
    positions = dict(state.positions)
    for point, dummy in dummy_at.items():
        nodes[dummy] = (0.0, 0.0)
        positions[dummy] = point

    new_routes: Dict[Edge, Tuple[Point, ...]] = {}
    chains: Dict[Edge, Tuple[NodeId, ...]] = {}
    for u, v in edges:
        route = routes[(u, v)]
        cuts = [p for p, members in point_edges.items() if (u, v) in members]
        chain = [u]
        pieces = _split_route(route, cuts)
        for index, piece in enumerate(pieces):
            end = v if index == len(pieces) - 1 else dummy_at[piece[-1]]
            start = chain[-1]
            key = edge_key(start, end)
            if key in new_routes:
                # Two crossings shared by the same pair of edges: keep the graph simple
                mid = _midpoint(piece)
                extra = next_id
                next_id += 1
                nodes[extra] = (0.0, 0.0)
                positions[extra] = mid
                crossings[extra] = ((u, v),)
                first, second = _split_route(piece, [mid])
                new_routes[edge_key(start, extra)] = first if start < extra else tuple(reversed(first))
                chain.append(extra)
                start = extra
                piece = second
                key = edge_key(start, end)
            new_routes[key] = piece if start < end else tuple(reversed(piece))
            chain.append(end)
        chains[(u, v)] = tuple(chain)

    planar_graph = Graph(nodes=dict(sorted(nodes.items())), edges=new_routes.keys(), dummies=crossings.keys())
    planar_state = LayoutState(
        graph=planar_graph, positions=positions, routes=new_routes, stage=state.stage, baseline=state.baseline
    )
    if crossings:
        logger.debug(f"Planarized {len(point_edges)} crossings with {len(crossings)} dummy nodes")
    return PlanarizedCore(state=planar_state, crossings=crossings, chains=chains)


def _uniform_rescale(coordinates: np.ndarray, graph: Graph, cell: float) -> np.ndarray:
    "Scale about the centroid so the median edge length equals the grid pitch"
    index = {node: i for i, node in enumerate(graph.node_ids)}
    lengths = [np.linalg.norm(coordinates[index[u]] - coordinates[index[v]]) for u, v in graph.sorted_edges]
    median = float(np.median(lengths)) if lengths else 0.0
    if median <= 0:
        return coordinates
    center = coordinates.mean(axis=0)
    return center + (coordinates - center) * (cell / median)


def orthogonalize_core(
    core: LayoutState, cfg: LayoutConfig, first_dummy_id: Optional[NodeId] = None
) -> Tuple[LayoutState, PlanarizedCore]:
    """
    Turn a distributed core into an orthogonal drawing and its planarization.

    Snap, align and route, steering the spread ratio toward the target before snapping
    and again after alignment (then snapping once more). The bounding-box aspect ratio
    drift is audited in the log, never enforced.

    Args:
        core (LayoutState): The selected distribution layout.
        cfg (LayoutConfig): The layout config.

    Returns:
        tuple[LayoutState, PlanarizedCore]: The routed core and its planarization.
    """
    graph = core.graph
    cell = grid_pitch(graph, cfg.ideal_edge_length)
    eps = _variance_floor(cfg.ideal_edge_length)
    steer = not cfg.baseline and len(graph.nodes) > 1

    coordinates = core.position_array()
    if steer:
        coordinates, _ = _normalize(coordinates, cfg.target_ar.value, eps)
    coordinates = _uniform_rescale(coordinates, graph, cell)
    grid = align_neighbors(snap_to_grid(core.with_array(coordinates), cell), graph)

    if steer:
        world = np.array([grid.world(node) for node in graph.node_ids], dtype=float)
        world, _ = _normalize(world, cfg.target_ar.value, eps)
        grid = align_neighbors(snap_to_grid(core.with_array(world), cell), graph)

    state = route_orthogonal(grid, graph, baseline=cfg.baseline)
    planar = planarize(state, cell, first_dummy_id)
    planar = planar.model_copy(update={"grid": grid})

    before, after = bounding_box(core).aspect_ratio, bounding_box(state).aspect_ratio
    drift = abs(math.log(after / before)) if before > 0 and after > 0 and math.isfinite(before * after) else math.inf
    message = f"Orthogonalized core: ar {before:.3f} -> {after:.3f}, {len(planar.crossings)} dummy nodes"
    if drift > math.log(AR_DRIFT_LIMIT):
        logger.warning(f"{message} (aspect ratio drifted by more than a factor {AR_DRIFT_LIMIT})")
    else:
        logger.info(message)

    # Routes with collinear overlaps separated, dummies not inserted
    state = state.model_copy(update={"routes": restore_chains(planar.state, planar)})
    return state, planar


def _oriented(state: LayoutState, a: NodeId, b: NodeId) -> Tuple[Point, ...]:
    "Route of the edge between a and b, running from a to b"
    route = state.route(edge_key(a, b))
    return route if a < b else tuple(reversed(route))


def restore_chains(state: LayoutState, planar: PlanarizedCore) -> Dict[Edge, Tuple[Point, ...]]:
    "Routes of the original edges, rebuilt by joining their pieces through dummy nodes"
    return {
        edge: simplify_route(
            [point for i, (a, b) in enumerate(zip(chain, chain[1:])) for point in _oriented(state, a, b)[(1 if i else 0) :]]
        )
        for edge, chain in planar.chains.items()
    }
