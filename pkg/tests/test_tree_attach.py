import math

import pytest
from conftest import make_graph, make_state
from hypothesis import given, settings
from hypothesis import strategies as st

from lib.layout import (
    Face,
    PlacementCandidate,
    apply_expansion,
    attach_trees,
    compact_and_route,
    enumerate_candidates,
    enumerate_faces,
    expansion_cost,
    layout_trees,
    overlapping_pairs,
    peel_trees,
    placement_cost,
    planarize,
)
from lib.layout.geometry import is_axis_aligned
from lib.models import ORIENTATIONS, BoundingBox, LayoutConfig, PeeledTree, bounding_box


def test_square_has_two_faces(c4_square):
    faces = enumerate_faces(c4_square)
    assert len(faces) == 2
    inner, outer = sorted(faces, key=lambda f: f.is_external)
    assert inner.signed_area == pytest.approx(1600.0)
    assert outer.signed_area == pytest.approx(-1600.0)
    assert outer.is_external and not inner.is_external
    assert sorted(inner.boundary) == [0, 1, 2, 3]
    # A convex corner opens no cardinal direction into the square
    assert all(directions == () for directions in inner.directions.values())
    assert outer.directions[0] == ("S", "W")
    assert outer.directions[2] == ("N", "E")


def test_edgeless_layout_is_one_open_face():
    faces = enumerate_faces(make_state({0: (0.0, 0.0)}, []))
    assert len(faces) == 1
    assert faces[0].is_external
    assert faces[0].directions[0] == tuple(ORIENTATIONS)


def _lone_child_tree() -> PeeledTree:
    return PeeledTree(
        root=0,
        nodes=frozenset({2}),
        edges=frozenset({(0, 2)}),
        children={0: (2,)},
        sizes={0: (20.0, 20.0), 2: (20.0, 20.0)},
        sub_layout={0: (0.0, 0.0), 2: (0.0, 80.0)},
        bbox=BoundingBox(min_x=-10.0, min_y=-10.0, max_x=10.0, max_y=90.0),
    )


@pytest.fixture
def two_nodes():
    return make_state({0: (0.0, 0.0), 1: (60.0, 0.0)}, [])


def _candidate(tree: PeeledTree, orientation: str) -> PlacementCandidate:
    face = Face(id=0, boundary=(0,), is_external=True, directions={0: tuple(ORIENTATIONS)})
    return PlacementCandidate(tree=tree, face=face, orientation=orientation)


def test_expansion_toward_a_neighbour(two_nodes):
    # Growing east runs into node 1 sixty units short of the room needed
    assert expansion_cost(_candidate(_lone_child_tree(), "E"), two_nodes, LayoutConfig()) == pytest.approx((60.0, 0.0))


def test_expansion_into_open_space(two_nodes):
    assert expansion_cost(_candidate(_lone_child_tree(), "N"), two_nodes, LayoutConfig()) == pytest.approx((0.0, 0.0))


def test_apply_expansion_moves_only_beyond_the_line(two_nodes):
    expanded = apply_expansion(two_nodes, "x", 30.0, 60.0)
    assert expanded.positions == {0: (0.0, 0.0), 1: (120.0, 0.0)}
    assert apply_expansion(two_nodes, "x", 30.0, 0.0) is two_nodes
    shrunk = apply_expansion(two_nodes, "x", 30.0, 5.0, direction=-1)
    assert shrunk.positions[0] == (-5.0, 0.0)


def test_candidates_follow_face_order(c4_square):
    tree = _lone_child_tree()
    candidates = enumerate_candidates(tree, enumerate_faces(c4_square))
    assert [(c.orientation, c.flip) for c in candidates] == [("S", False), ("S", True), ("W", False), ("W", True)]


@pytest.fixture
def pendant_scene(c4_square):
    graph = make_graph(5, [(0, 1), (1, 2), (2, 3), (0, 3), (0, 4)])
    decomposition = layout_trees(peel_trees(graph), 40.0)
    return graph, decomposition, c4_square, planarize(c4_square, 40.0)


def test_placement_cost_prefers_widening(pendant_scene):
    _, decomposition, core, planar = pendant_scene
    cfg = LayoutConfig(target_ar="16:9")
    (tree,) = decomposition.trees
    costs = {
        (c.orientation, c.flip): placement_cost(c, planar.state, cfg)
        for c in enumerate_candidates(tree, enumerate_faces(planar.state))
    }
    west = costs[("W", False)]
    assert (west.c_x, west.c_y) == pytest.approx((0.0, 0.0))
    assert west.ar_proj == pytest.approx(100 / 60)
    assert west.lam == pytest.approx((1 / 3) ** 0.75)
    assert west.c_final == pytest.approx(0.073, abs=1e-3)
    assert costs[("S", False)].c_final == pytest.approx(20.7, abs=0.1)
    assert costs[("W", True)].c_final == pytest.approx(west.c_final)


@pytest.mark.parametrize(
    "target, weights, c_ar",
    [
        (5 / 6, (1.0, 0.85), math.log(2) ** 2),
        (10 / 3, (0.85, 1.0), math.log(2) ** 2),
        (5 / 3, (1.0, 1.0), 0.0),
    ],
    ids=["too-wide", "too-tall", "on-target"],
)
def test_weight_branches(pendant_scene, target, weights, c_ar):
    # Hanging west makes the drawing 100 by 60
    _, decomposition, _, planar = pendant_scene
    cfg = LayoutConfig(target_ar=target)
    (tree,) = decomposition.trees
    west = next(
        c
        for c in enumerate_candidates(tree, enumerate_faces(planar.state))
        if (c.orientation, c.flip) == ("W", False)
    )
    cost = placement_cost(west, planar.state, cfg)
    assert (cost.w_x, cost.w_y) == weights
    assert cost.c_ar == pytest.approx(c_ar, abs=1e-9)
    assert cost.c_final == pytest.approx(cost.c_space + cost.lam * 40.0 * cost.c_ar, abs=1e-9)


def test_baseline_cost_ignores_aspect_ratio(pendant_scene):
    _, decomposition, _, planar = pendant_scene
    cfg = LayoutConfig(target_ar="16:9", baseline=True)
    (tree,) = decomposition.trees
    for candidate in enumerate_candidates(tree, enumerate_faces(planar.state)):
        cost = placement_cost(candidate, planar.state, cfg)
        assert cost.lam == 0.0
        assert (cost.w_x, cost.w_y) == (1.0, 1.0)
        assert cost.c_final == pytest.approx(cost.c_x + cost.c_y)


def test_pendant_hangs_west_for_a_wide_target(pendant_scene):
    graph, decomposition, core, planar = pendant_scene
    placements = []
    state = attach_trees(decomposition, core, planar, LayoutConfig(target_ar="16:9"), placements)
    assert state.graph == graph
    assert state.positions[4] == pytest.approx((-40.0, 0.0))
    assert state.route((0, 4)) == ((0.0, 0.0), (-40.0, 0.0))
    assert len(placements) == 4
    (chosen,) = [p for p in placements if p["chosen"]]
    assert (chosen["orientation"], chosen["flip"]) == ("W", False)


def test_attached_trees_do_not_overlap():
    # Two stars hanging off opposite corners of a square
    edges = [(0, 1), (1, 2), (2, 3), (0, 3), (0, 4), (0, 5), (0, 6), (2, 7), (7, 8), (7, 9)]
    graph = make_graph(10, edges)
    decomposition = layout_trees(peel_trees(graph), 40.0)
    core = make_state(
        {0: (0.0, 0.0), 1: (40.0, 0.0), 2: (40.0, 40.0), 3: (0.0, 40.0)}, [(0, 1), (1, 2), (2, 3), (0, 3)]
    )
    state = attach_trees(decomposition, core, planarize(core, 40.0), LayoutConfig(target_ar="1:2"))
    assert set(state.positions) == set(range(10))
    assert overlapping_pairs(state) == []
    assert all(is_axis_aligned(route) for route in state.all_routes().values())


def test_compaction_closes_wide_gaps():
    state = make_state({0: (0.0, 0.0), 1: (200.0, 0.0)}, [(0, 1)])
    compacted = compact_and_route(state)
    assert compacted.positions[1] == pytest.approx((60.0, 0.0))
    assert compacted.positions[0] == (0.0, 0.0)


def test_compaction_keeps_tight_layouts(c4_square):
    assert compact_and_route(c4_square).positions == c4_square.positions


@pytest.mark.parametrize("corner, side, offset", [(0, "W", -40.0), (1, "E", 40.0), (2, "E", 40.0), (3, "W", -40.0)])
def test_pendant_widens_a_square_core(c4_square, corner, side, offset):
    graph = make_graph(5, [(0, 1), (1, 2), (2, 3), (0, 3), (corner, 4)])
    decomposition = layout_trees(peel_trees(graph), 40.0)
    placements = []
    state = attach_trees(decomposition, c4_square, planarize(c4_square, 40.0), LayoutConfig(target_ar="16:9"), placements)
    (chosen,) = [p for p in placements if p["chosen"]]
    assert chosen["orientation"] == side
    assert {p["orientation"] for p in placements} == {side, "N" if corner >= 2 else "S"}
    x, y = c4_square.positions[corner]
    assert state.positions[4] == pytest.approx((x + offset, y))


def _chord_scene():
    # Chord (2, 3) crosses edge (0, 1) at (40, 0); node 4 hangs off node 0
    graph = make_graph(5, [(0, 1), (0, 2), (1, 3), (2, 3), (0, 4)])
    routes = {
        (0, 1): ((0.0, 0.0), (80.0, 0.0)),
        (0, 2): ((0.0, 0.0), (0.0, -40.0), (40.0, -40.0)),
        (1, 3): ((80.0, 0.0), (80.0, 40.0), (40.0, 40.0)),
        (2, 3): ((40.0, -40.0), (40.0, 40.0)),
    }
    core = make_state({0: (0.0, 0.0), 1: (80.0, 0.0), 2: (40.0, -40.0), 3: (40.0, 40.0)}, list(routes), routes=routes)
    return graph, layout_trees(peel_trees(graph), 40.0), core


def test_dummies_never_share_ids_with_tree_nodes():
    graph, decomposition, core = _chord_scene()
    planar = planarize(core, 40.0, first_dummy_id=max(graph.node_ids) + 1)
    assert planar.dummies == (5,)
    assert not set(planar.dummies) & set(graph.node_ids)
    state = attach_trees(decomposition, core, planar, LayoutConfig())
    assert state.graph == graph
    assert overlapping_pairs(state) == []
    for (u, v), route in state.all_routes().items():
        assert is_axis_aligned(route)
        assert route[0] == state.positions[u] and route[-1] == state.positions[v]


def test_attach_refuses_dummies_numbered_like_tree_nodes():
    _, decomposition, core = _chord_scene()
    planar = planarize(core, 40.0)
    assert planar.dummies == (4,)
    with pytest.raises(ValueError):
        attach_trees(decomposition, core, planar, LayoutConfig())


def test_expansion_reroutes_routes_across_the_line():
    detour = ((0.0, 0.0), (20.0, 0.0), (20.0, 20.0), (50.0, 20.0), (50.0, 40.0), (60.0, 40.0))
    state = make_state({0: (0.0, 0.0), 1: (60.0, 40.0)}, [(0, 1)], routes={(0, 1): detour})
    expanded = apply_expansion(state, "x", 30.0, 60.0)
    assert expanded.positions[1] == (120.0, 40.0)
    assert expanded.route((0, 1)) == ((0.0, 0.0), (120.0, 0.0), (120.0, 40.0))


def test_compaction_reroutes_every_edge():
    detour = ((0.0, 0.0), (0.0, 40.0), (200.0, 40.0), (200.0, 0.0))
    state = make_state({0: (0.0, 0.0), 1: (200.0, 0.0)}, [(0, 1)], routes={(0, 1): detour})
    compacted = compact_and_route(state)
    assert compacted.route((0, 1)) == ((0.0, 0.0), (60.0, 0.0))


def test_compaction_pushes_overlapping_boxes_apart():
    state = make_state({0: (0.0, 0.0), 1: (10.0, 4.0), 2: (60.0, 0.0)}, [(0, 1), (1, 2)])
    compacted = compact_and_route(state)
    assert overlapping_pairs(compacted) == []
    assert all(is_axis_aligned(route) for route in compacted.all_routes().values())


@st.composite
def spread_layouts(draw):
    n = draw(st.integers(min_value=2, max_value=7))
    cells = draw(
        st.lists(
            st.tuples(st.integers(min_value=0, max_value=5), st.integers(min_value=0, max_value=5)),
            min_size=n,
            max_size=n,
            unique=True,
        )
    )
    pitch = draw(st.sampled_from([40.0, 70.0, 130.0]))
    pairs = [(u, v) for u in range(n) for v in range(u + 1, n)]
    edges = draw(st.lists(st.sampled_from(pairs), min_size=1, max_size=n))
    return make_state({i: (x * pitch, y * pitch) for i, (x, y) in enumerate(cells)}, edges)


@given(spread_layouts())
@settings(deadline=None, max_examples=50)
def test_compaction_never_grows_the_drawing(state):
    compacted = compact_and_route(state)
    assert bounding_box(compacted).area <= bounding_box(state).area + 1e-6
    assert overlapping_pairs(compacted) == []
    assert all(is_axis_aligned(route) for route in compacted.all_routes().values())
