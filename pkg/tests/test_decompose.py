import pytest
from conftest import connected_graphs, make_graph
from hypothesis import given, settings

from lib.layout import layout_trees, peel_trees, symmetric_tree_layout


def test_cycle_has_no_trees(c4_graph):
    decomposition = peel_trees(c4_graph)
    assert decomposition.core == c4_graph
    assert decomposition.trees == ()


def test_star_is_one_tree():
    star = make_graph(6, [(0, i) for i in range(1, 6)])
    decomposition = peel_trees(star)
    assert decomposition.core.node_ids == (0,)
    assert len(decomposition.trees) == 1
    tree = decomposition.trees[0]
    assert tree.root == 0
    assert tree.nodes == {1, 2, 3, 4, 5}
    assert tree.children[0] == (1, 2, 3, 4, 5)


def test_pendants_on_a_cycle():
    # C4 with a pendant path 4-5 on node 0 and a leaf 6 on node 2
    graph = make_graph(7, [(0, 1), (1, 2), (2, 3), (0, 3), (0, 4), (4, 5), (2, 6)])
    decomposition = peel_trees(graph)
    assert decomposition.core.node_ids == (0, 1, 2, 3)
    assert [t.root for t in decomposition.trees] == [0, 2]
    assert decomposition.trees[0].nodes == {4, 5}
    assert decomposition.trees[0].children == {0: (4,), 4: (5,)}
    assert decomposition.trees[1].nodes == {6}


def test_path_core_is_its_centre():
    assert peel_trees(make_graph(5, [(0, 1), (1, 2), (2, 3), (3, 4)])).core.node_ids == (2,)


def test_even_path_core_picks_smaller_id():
    assert peel_trees(make_graph(4, [(0, 1), (1, 2), (2, 3)])).core.node_ids == (1,)


def test_single_node():
    decomposition = peel_trees(make_graph(1, []))
    assert decomposition.core.node_ids == (0,)
    assert decomposition.trees == ()


@given(connected_graphs(max_nodes=15))
@settings(max_examples=80, deadline=None)
def test_decomposition_partitions_the_graph(graph):
    decomposition = peel_trees(graph)
    core_nodes = set(decomposition.core.node_ids)
    tree_nodes = [node for tree in decomposition.trees for node in tree.nodes]
    assert len(tree_nodes) == len(set(tree_nodes))
    assert core_nodes.isdisjoint(tree_nodes)
    assert core_nodes | set(tree_nodes) == set(graph.node_ids)
    assert decomposition.recombine() == graph
    for tree in decomposition.trees:
        assert tree.root in core_nodes
        assert len(tree.edges) == len(tree.nodes)
    if len(graph.edges) >= len(graph.nodes):
        assert all(decomposition.core.degree(n) >= 2 for n in core_nodes)


def _binary_tree(depth: int):
    edges = [((i - 1) // 2, i) for i in range(1, 2 ** (depth + 1) - 1)]
    return make_graph(2 ** (depth + 1) - 1, edges)


def test_binary_tree_layout_is_mirror_symmetric():
    graph = _binary_tree(3)
    decomposition = layout_trees(peel_trees(graph), 40.0)
    tree = decomposition.trees[0]
    layout = tree.sub_layout
    assert layout[0] == (0.0, 0.0)
    xs = sorted(x for x, _ in layout.values())
    assert xs == pytest.approx(sorted(-x for x in xs))
    # Node 1 and node 2 head isomorphic subtrees on opposite sides
    assert layout[1][0] == pytest.approx(-layout[2][0])
    assert layout[1][1] == layout[2][1]
    depths = {node: y for node, (_, y) in layout.items()}
    assert all(depths[child] > depths[parent] for parent, kids in tree.children.items() for child in kids)


def test_binary_tree_extent():
    tree = layout_trees(peel_trees(_binary_tree(3)), 40.0).trees[0]
    assert tree.bbox.width == pytest.approx(300.0)
    assert tree.bbox.height == pytest.approx(140.0)


def test_tree_layout_has_no_overlaps():
    graph = make_graph(10, [(0, 1), (0, 2), (0, 3), (1, 4), (1, 5), (1, 6), (2, 7), (3, 8), (8, 9)])
    tree = symmetric_tree_layout(peel_trees(graph).trees[0], 40.0)
    points = list(tree.sub_layout.items())
    for i, (a, (xa, ya)) in enumerate(points):
        for b, (xb, yb) in points[i + 1 :]:
            assert abs(xa - xb) >= 20.0 or abs(ya - yb) >= 20.0, (a, b)
