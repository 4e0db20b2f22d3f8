from typing import Dict, FrozenSet, Optional, Tuple

from pydantic import BaseModel, ConfigDict

from .graph import BoundingBox, Edge, Graph, NodeId, Point, Size


class PeeledTree(BaseModel):
    """
    A peripheral tree hanging off a single core node.

    `sub_layout` holds (lateral, depth) offsets relative to the root, in the
    canonical orientation where depth grows away from the core. It is empty
    until the tree has been laid out.
    """

    model_config = ConfigDict(frozen=True)

    root: NodeId
    nodes: FrozenSet[NodeId]
    edges: FrozenSet[Edge]
    children: Dict[NodeId, Tuple[NodeId, ...]]
    sizes: Dict[NodeId, Size]
    sub_layout: Dict[NodeId, Point] = {}
    bbox: Optional[BoundingBox] = None

    @property
    def area(self) -> float:
        return self.bbox.area if self.bbox is not None else 0.0

    def subtree_size(self, node: NodeId) -> int:
        "Number of nodes in the subtree rooted at `node` (itself included)"
        return 1 + sum(self.subtree_size(child) for child in self.children.get(node, ()))


class Decomposition(BaseModel):
    "A core graph plus the peripheral trees peeled off it"

    model_config = ConfigDict(frozen=True)

    core: Graph
    trees: Tuple[PeeledTree, ...] = ()

    def recombine(self) -> Graph:
        "Rebuild the graph the decomposition was taken from"
        nodes = dict(self.core.nodes)
        edges = set(self.core.edges)
        for tree in self.trees:
            nodes.update({node: tree.sizes[node] for node in tree.nodes})
            edges |= tree.edges
        return Graph(nodes=dict(sorted(nodes.items())), edges=edges)
