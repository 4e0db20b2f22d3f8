from collections import deque
from typing import Dict, List, Set, Tuple

import networkx as nx
from loguru import logger

from lib.models import BoundingBox, Decomposition, Graph, NodeId, PeeledTree, Point, edge_key


def _tree_core(graph: Graph) -> NodeId:
    """
    Core node of a graph that is itself a tree.

    The single centre, or for two centres the endpoint on the larger side of the
    central edge (smaller id on a tie).
    """
    nx_graph = graph.to_networkx()
    centers = sorted(nx.center(nx_graph))
    if len(centers) == 1:
        return centers[0]
    a, b = centers
    nx_graph.remove_edge(a, b)
    size_a = len(nx.node_connected_component(nx_graph, a))
    size_b = len(nx.node_connected_component(nx_graph, b))
    if size_a == size_b:
        return a
    return a if size_a > size_b else b


def _peel_leaves(graph: Graph) -> Set[NodeId]:
    "Nodes left after repeatedly deleting degree-1 nodes"
    degree = {node: graph.degree(node) for node in graph.node_ids}
    queue = deque(node for node in graph.node_ids if degree[node] == 1)
    removed: Set[NodeId] = set()
    while queue:
        node = queue.popleft()
        if node in removed:
            continue
        removed.add(node)
        for neighbour in graph.neighbors(node):
            if neighbour not in removed:
                degree[neighbour] -= 1
                if degree[neighbour] == 1:
                    queue.append(neighbour)
    return set(graph.node_ids) - removed


def _collect_tree(graph: Graph, root: NodeId, core: Set[NodeId]) -> PeeledTree:
    "Breadth-first walk from a core node through every peeled node hanging off it"
    children: Dict[NodeId, Tuple[NodeId, ...]] = {}
    nodes: Set[NodeId] = set()
    edges = set()
    frontier = [root]
    seen = {root}
    while frontier:
        next_frontier = []
        for parent in frontier:
            kids = tuple(sorted(n for n in graph.neighbors(parent) if n not in core and n not in seen))
            if kids:
                children[parent] = kids
            for kid in kids:
                seen.add(kid)
                nodes.add(kid)
                edges.add(edge_key(parent, kid))
            next_frontier.extend(kids)
        frontier = next_frontier
    sizes = {node: graph.size(node) for node in nodes | {root}}
    return PeeledTree(root=root, nodes=frozenset(nodes), edges=frozenset(edges), children=children, sizes=sizes)


def peel_trees(graph: Graph) -> Decomposition:
    """
    Split a connected graph into a core and the peripheral trees hanging off it.

    Degree-1 nodes are deleted until none remain; everything deleted that hangs off a
    surviving node forms one tree rooted there. A graph that is itself a tree keeps a
    one-node core.

    Args:
        graph (Graph): A connected graph.

    Returns:
        Decomposition: The core and its trees, ordered by root id.
    """
    if len(graph.nodes) == 1:
        return Decomposition(core=graph)
    if len(graph.edges) == len(graph.nodes) - 1:
        core_nodes = {_tree_core(graph)}
    else:
        core_nodes = _peel_leaves(graph)

    trees: List[PeeledTree] = []
    for root in sorted(core_nodes):
        if any(n not in core_nodes for n in graph.neighbors(root)):
            trees.append(_collect_tree(graph, root, core_nodes))

    core = graph.subgraph(core_nodes)
    logger.debug(
        f"Peeled {len(trees)} trees ({sum(len(t.nodes) for t in trees)} nodes) off a {len(core.nodes)}-node core"
    )
    return Decomposition(core=core, trees=tuple(trees))


def _arrange(children: List[NodeId], subtree_size: Dict[NodeId, int]) -> List[NodeId]:
    "Left-to-right sibling order: largest in the middle, then alternating right and left"
    ranked = sorted(children, key=lambda c: (-subtree_size[c], c))
    order = deque(ranked[:1])
    for i, child in enumerate(ranked[1:]):
        if i % 2 == 0:
            order.append(child)
        else:
            order.appendleft(child)
    return list(order)


def symmetric_tree_layout(tree: PeeledTree, ideal_edge_length: float) -> PeeledTree:
    """
    Give a peeled tree a layered, symmetric drawing relative to its root.

    Offsets are (lateral, depth) with depth growing away from the core. Subtrees left
    of their parent are drawn as mirror images, so equal sibling subtrees mirror exactly.

    Args:
        tree (PeeledTree): The tree to lay out.
        ideal_edge_length (float): Level pitch and sibling spacing scale.

    Returns:
        PeeledTree: The tree with `sub_layout` and `bbox` filled in.
    """
    gap = ideal_edge_length / 2
    sizes = tree.sizes

    subtree_size: Dict[NodeId, int] = {}
    slot: Dict[NodeId, float] = {}

    def measure(node: NodeId):
        kids = tree.children.get(node, ())
        for kid in kids:
            measure(kid)
        subtree_size[node] = 1 + sum(subtree_size[k] for k in kids)
        row = sum(slot[k] for k in kids) + gap * (len(kids) - 1) if kids else 0.0
        slot[node] = max(sizes[node][0], row)

    def place(node: NodeId) -> Dict[NodeId, Point]:
        layout: Dict[NodeId, Point] = {node: (0.0, 0.0)}
        kids = _arrange(list(tree.children.get(node, ())), subtree_size)
        if not kids:
            return layout
        row_height = max(sizes[k][1] for k in kids)
        pitch = max(ideal_edge_length, sizes[node][1] / 2 + row_height / 2 + ideal_edge_length / 4)
        total = sum(slot[k] for k in kids) + gap * (len(kids) - 1)
        cursor = -total / 2
        for kid in kids:
            offset = cursor + slot[kid] / 2
            cursor += slot[kid] + gap
            sub = place(kid)
            mirror = -1.0 if offset < 0 else 1.0
            for n, (x, y) in sub.items():
                layout[n] = (offset + mirror * x, pitch + y)
        return layout

    measure(tree.root)
    layout = place(tree.root)
    bbox = BoundingBox.around(layout[tree.root], sizes[tree.root])
    for node, point in layout.items():
        bbox = bbox.union(BoundingBox.around(point, sizes[node]))
    return tree.model_copy(update={"sub_layout": layout, "bbox": bbox})


def layout_trees(decomposition: Decomposition, ideal_edge_length: float) -> Decomposition:
    "Lay out every tree of a decomposition"
    trees = tuple(symmetric_tree_layout(tree, ideal_edge_length) for tree in decomposition.trees)
    return decomposition.model_copy(update={"trees": trees})
