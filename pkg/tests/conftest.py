from typing import Dict, Iterable, Optional, Tuple

import pytest
from hypothesis import strategies as st

from lib.models import Graph, LayoutState, Stage


def make_graph(n: int, edges: Iterable[Tuple[int, int]], size: float = 20.0) -> Graph:
    return Graph(nodes={i: (size, size) for i in range(n)}, edges=list(edges))


def make_state(
    positions: Dict[int, Tuple[float, float]],
    edges: Iterable[Tuple[int, int]],
    size: float = 20.0,
    routes: Optional[dict] = None,
    stage: Stage = Stage.ORTHOGONAL,
) -> LayoutState:
    graph = Graph(nodes={node: (size, size) for node in positions}, edges=list(edges))
    return LayoutState(graph=graph, positions=positions, routes=routes or {}, stage=stage)


@st.composite
def connected_graphs(draw, min_nodes: int = 2, max_nodes: int = 12) -> Graph:
    "A random spanning tree plus a few random chords"
    n = draw(st.integers(min_value=min_nodes, max_value=max_nodes))
    edges = {(draw(st.integers(min_value=0, max_value=i - 1)), i) for i in range(1, n)}
    pairs = [(u, v) for u in range(n) for v in range(u + 1, n)]
    extra = draw(st.lists(st.sampled_from(pairs), max_size=n)) if pairs else []
    return make_graph(n, edges | set(extra))


@pytest.fixture
def c4_graph() -> Graph:
    return make_graph(4, [(0, 1), (1, 2), (2, 3), (0, 3)])


@pytest.fixture
def c4_square() -> LayoutState:
    "Unit-edge square drawing of C4 with 20x20 boxes and 40-unit edges"
    return make_state({0: (0.0, 0.0), 1: (40.0, 0.0), 2: (40.0, 40.0), 3: (0.0, 40.0)}, [(0, 1), (1, 2), (2, 3), (0, 3)])
