import math
from itertools import combinations

import numpy as np
import pytest
from conftest import connected_graphs, make_state
from hypothesis import assume, given, settings
from hypothesis import strategies as st
from scipy.optimize import minimize_scalar
from scipy.spatial.distance import pdist

from lib.layout import scale_about
from lib.metrics import (
    count_crossings,
    metric_ar,
    metric_ec,
    metric_eld,
    metric_ksm,
    metric_np,
    metric_nr,
    metric_nu,
    report,
)
from lib.models import BoundingBox, bounding_box, graph_distances


def test_ar_is_bounding_box_ratio(c4_square):
    wide = c4_square.model_copy(update={"positions": {**c4_square.positions, 1: (100.0, 0.0), 2: (100.0, 40.0)}})
    assert metric_ar(wide) == pytest.approx(120 / 60)


def test_ksm_of_an_exact_embedding():
    path = make_state({0: (0.0, 0.0), 1: (5.0, 0.0), 2: (10.0, 0.0)}, [(0, 1), (1, 2)])
    assert metric_ksm(path, graph_distances(path.graph, 40.0)) == pytest.approx(1.0)


def test_ksm_of_an_equilateral_triangle():
    triangle = make_state({0: (0.0, 0.0), 1: (2.0, 0.0), 2: (1.0, math.sqrt(3))}, [(0, 1), (1, 2), (0, 2)])
    assert metric_ksm(triangle, graph_distances(triangle.graph, 40.0)) == pytest.approx(1.0)


def test_ksm_of_coincident_nodes():
    state = make_state({0: (3.0, 3.0), 1: (3.0, 3.0)}, [(0, 1)])
    assert metric_ksm(state, graph_distances(state.graph, 40.0)) == 0.0


@given(connected_graphs(min_nodes=3, max_nodes=9), st.integers(min_value=0, max_value=2**32 - 1))
@settings(max_examples=50, deadline=None)
def test_ksm_matches_a_scalar_search(graph, seed):
    rng = np.random.default_rng(seed)
    positions = {node: tuple(rng.uniform(-50, 50, size=2)) for node in graph.node_ids}
    state = make_state(positions, graph.edges)
    distances = graph_distances(graph, 40.0)
    upper = distances[np.triu_indices(len(positions), k=1)]
    norms = pdist(state.position_array())
    best = minimize_scalar(lambda s: float(np.sum((upper - s * norms) ** 2)), bracket=(0.0, 1.0), tol=1e-12)
    expected = max(0.0, 1 - math.sqrt(best.fun / float(np.dot(upper, upper))))
    assert metric_ksm(state, distances) == pytest.approx(expected, abs=1e-6)


def test_eld_of_unequal_edges():
    state = make_state({0: (0.0, 0.0), 1: (1.0, 0.0), 2: (0.0, 10.0), 3: (3.0, 10.0)}, [(0, 1), (2, 3)])
    assert metric_eld(state) == pytest.approx(0.5)


def test_eld_uses_route_length():
    state = make_state(
        {0: (0.0, 0.0), 1: (40.0, 40.0), 2: (100.0, 0.0)},
        [(0, 1), (1, 2)],
        routes={(0, 1): ((0.0, 0.0), (40.0, 0.0), (40.0, 40.0)), (1, 2): ((40.0, 40.0), (100.0, 40.0), (100.0, 0.0))},
    )
    # Routes of 80 and 100 units
    assert metric_eld(state) == pytest.approx(1 - 10 / 90)


def test_eld_without_edges():
    assert metric_eld(make_state({0: (0.0, 0.0), 1: (10.0, 0.0)}, [])) == 1.0


def test_node_resolution():
    assert metric_nr(make_state({0: (0.0, 0.0), 1: (7.0, 1.0)}, [])) == pytest.approx(1.0)
    assert metric_nr(make_state({0: (0.0, 0.0), 1: (10.0, 0.0), 2: (20.0, 0.0)}, [])) == pytest.approx(0.5)
    assert metric_nr(make_state({0: (0.0, 0.0)}, [])) == 1.0


def test_uniformity_of_corners():
    corners = make_state({0: (0.0, 0.0), 1: (10.0, 0.0), 2: (0.0, 10.0), 3: (10.0, 10.0)}, [], size=0.0)
    assert metric_nu(corners) == pytest.approx(1.0)


def test_uniformity_of_one_crowded_cell():
    crowded = make_state({0: (1.0, 1.0), 1: (2.0, 2.0), 2: (1.0, 2.0), 3: (2.0, 1.0)}, [], size=0.0)
    assert metric_nu(crowded, frame=BoundingBox(min_x=0.0, min_y=0.0, max_x=10.0, max_y=10.0)) == pytest.approx(0.0)


def test_uniformity_of_a_flat_box():
    line = make_state({0: (0.0, 0.0), 1: (10.0, 0.0)}, [], size=0.0)
    assert metric_nu(line) == 0.0


def test_neighbourhood_preservation():
    assert metric_np(make_state({0: (0.0, 0.0), 1: (10.0, 0.0)}, [(0, 1)])) == pytest.approx(1.0)
    bent = make_state({0: (0.0, 0.0), 1: (10.0, 100.0), 2: (1.0, 0.0)}, [(0, 1), (1, 2)])
    assert metric_np(bent) == pytest.approx(1 / 3)


def test_crossing_pair():
    cross = make_state({0: (0.0, 0.0), 1: (80.0, 0.0), 2: (40.0, -40.0), 3: (40.0, 40.0)}, [(0, 1), (2, 3)])
    assert count_crossings(cross) == 1
    assert metric_ec(cross) == 0.0


def test_adjacent_edges_never_cross(c4_square):
    assert count_crossings(c4_square) == 0
    assert metric_ec(c4_square) == 1.0


def test_ec_ignores_scaling():
    state = make_state(
        {0: (0.0, 0.0), 1: (80.0, 0.0), 2: (40.0, -40.0), 3: (40.0, 40.0), 4: (100.0, 30.0)},
        [(0, 1), (2, 3), (3, 4), (1, 4)],
    )
    scaled = scale_about(state, 3.0, 0.5, bounding_box(state).center)
    assert metric_ec(scaled) == metric_ec(state)


def _strict_crossings(points, edges) -> int:
    def orientation(p, q, r):
        return np.sign((q[0] - p[0]) * (r[1] - p[1]) - (q[1] - p[1]) * (r[0] - p[0]))

    count = 0
    for (a, b), (c, d) in combinations(sorted(edges), 2):
        if {a, b} & {c, d}:
            continue
        p, q, r, s = points[a], points[b], points[c], points[d]
        if orientation(p, q, r) * orientation(p, q, s) < 0 and orientation(r, s, p) * orientation(r, s, q) < 0:
            count += 1
    return count


@given(
    connected_graphs(min_nodes=4, max_nodes=8),
    st.lists(st.tuples(st.integers(-20, 20), st.integers(-20, 20)), min_size=8, max_size=8, unique=True),
)
@settings(max_examples=80, deadline=None)
def test_crossings_match_a_brute_force_count(graph, coordinates):
    points = {node: (float(x), float(y)) for node, (x, y) in zip(graph.node_ids, coordinates)}
    for p, q, r in combinations(points.values(), 3):
        assume((q[0] - p[0]) * (r[1] - p[1]) != (q[1] - p[1]) * (r[0] - p[0]))
    state = make_state(points, graph.edges)
    assert count_crossings(state) == _strict_crossings(points, graph.edges)


@given(connected_graphs(min_nodes=2, max_nodes=10), st.integers(min_value=0, max_value=2**32 - 1))
@settings(max_examples=60, deadline=None)
def test_metrics_stay_in_range(graph, seed):
    rng = np.random.default_rng(seed)
    state = make_state({node: tuple(rng.uniform(-100, 100, size=2)) for node in graph.node_ids}, graph.edges)
    metrics = report(state)
    assert metrics.ar > 0
    for name in ("ksm", "eld", "nr", "nu", "np", "ec"):
        assert 0.0 <= getattr(metrics, name) <= 1.0
