import math

import networkx as nx
import numpy as np
import pytest
from conftest import connected_graphs, make_graph, make_state
from hypothesis import given, settings

from lib.models import (
    AspectRatioTarget,
    BoundingBox,
    Graph,
    GraphValidationError,
    LayoutConfig,
    LayoutState,
    bounding_box,
    graph_distances,
)


def test_edges_are_canonical():
    graph = make_graph(3, [(1, 0), (2, 1)])
    assert graph.edges == {(0, 1), (1, 2)}
    assert graph.neighbors(1) == {0, 2}
    assert graph.degree(0) == 1


@pytest.mark.parametrize(
    "edges",
    [[(0, 0)], [(0, 5)]],
    ids=["self-loop", "unknown-endpoint"],
)
def test_invalid_graphs_are_rejected(edges):
    with pytest.raises(ValueError):
        make_graph(2, edges)


def test_negative_box_rejected():
    with pytest.raises(ValueError):
        Graph(nodes={0: (-1.0, 5.0)})


def test_subgraph_is_induced():
    graph = make_graph(4, [(0, 1), (1, 2), (2, 3), (0, 3)])
    sub = graph.subgraph([0, 1, 2])
    assert sub.node_ids == (0, 1, 2)
    assert sub.edges == {(0, 1), (1, 2)}


def test_path_distances():
    distances = graph_distances(make_graph(4, [(0, 1), (1, 2), (2, 3)]), 40.0)
    assert distances[0, 3] == 120.0
    assert distances[2, 1] == 40.0
    assert np.all(np.diag(distances) == 0)


def test_disconnected_distances_raise():
    with pytest.raises(GraphValidationError):
        graph_distances(make_graph(4, [(0, 1), (2, 3)]), 40.0)


@given(connected_graphs())
@settings(max_examples=60, deadline=None)
def test_distances_are_a_metric(graph):
    d = graph_distances(graph, 40.0)
    n = len(graph.nodes)
    assert np.allclose(d, d.T)
    off_diagonal = d[~np.eye(n, dtype=bool)]
    assert np.all(off_diagonal >= 40.0)
    for k in range(n):
        assert np.all(d <= d[:, [k]] + d[[k], :] + 1e-9)

    bfs = dict(nx.all_pairs_shortest_path_length(graph.to_networkx()))
    index = {node: i for i, node in enumerate(graph.node_ids)}
    for u, lengths in bfs.items():
        for v, hops in lengths.items():
            assert d[index[u], index[v]] == hops * 40.0


def test_bounding_box_includes_boxes_and_routes():
    state = make_state({0: (0.0, 0.0), 1: (100.0, 0.0)}, [(0, 1)], routes={(0, 1): ((0.0, 0.0), (0.0, 50.0), (100.0, 50.0), (100.0, 0.0))})
    box = bounding_box(state)
    assert (box.min_x, box.max_x) == (-10.0, 110.0)
    assert (box.min_y, box.max_y) == (-10.0, 50.0)
    assert box.aspect_ratio == pytest.approx(2.0)


def test_aspect_ratio_of_flat_boxes():
    assert BoundingBox(min_x=0, min_y=0, max_x=160, max_y=90).aspect_ratio == pytest.approx(16 / 9)
    assert BoundingBox(min_x=0, min_y=0, max_x=10, max_y=0).aspect_ratio == math.inf
    assert BoundingBox(min_x=0, min_y=0, max_x=0, max_y=0).aspect_ratio == 1.0


def test_layout_requires_every_position():
    with pytest.raises(ValueError):
        LayoutState(graph=make_graph(2, [(0, 1)]), positions={0: (0.0, 0.0)})


def test_empty_layout_has_no_bounding_box():
    with pytest.raises(ValueError):
        bounding_box(LayoutState(graph=Graph(nodes={}), positions={}))


@pytest.mark.parametrize(
    "text, expected",
    [("16:9", 16 / 9), ("1:3", 1 / 3), ("1.777", 1.777), ("2", 2.0), (0.5, 0.5)],
)
def test_aspect_ratio_parse(text, expected):
    assert AspectRatioTarget.parse(text).value == pytest.approx(expected)


@pytest.mark.parametrize("text", ["0:1", "1:0", "wide", "-2", "nan"])
def test_aspect_ratio_parse_rejects(text):
    with pytest.raises(ValueError):
        AspectRatioTarget.parse(text)


def test_config_parses_target_and_forbids_unknown_keys():
    cfg = LayoutConfig(target_ar="4:3")
    assert cfg.target_ar.value == pytest.approx(4 / 3)
    assert str(cfg.target_ar) == "4:3"
    assert cfg.omega == cfg.ideal_edge_length
    with pytest.raises(ValueError):
        LayoutConfig(temperature=3)
    with pytest.raises(ValueError):
        LayoutConfig(seed=-1)
    with pytest.raises(ValueError):
        LayoutConfig(refine_cap=1.0)
