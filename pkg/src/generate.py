from pathlib import Path
from typing import Callable, Dict, Iterator, Tuple

import networkx as nx
import numpy as np
from loguru import logger
from tqdm import tqdm

from lib.io import serialize_graph
from lib.models import Graph

MIN_NODES = 10
MAX_NODES = 60


def to_graph(nx_graph: nx.Graph, node_size: float) -> Graph:
    "Relabel a networkx graph to 0..n-1 and give every node the same square box"
    nx_graph = nx.convert_node_labels_to_integers(nx_graph, ordering="sorted")
    return Graph(nodes={node: (node_size, node_size) for node in nx_graph.nodes}, edges=list(nx_graph.edges))


def cycles(rng: np.random.Generator, count: int) -> Iterator[nx.Graph]:
    for _ in range(count):
        yield nx.cycle_graph(int(rng.integers(MIN_NODES, MAX_NODES + 1)))


def grids(rng: np.random.Generator, count: int) -> Iterator[nx.Graph]:
    for _ in range(count):
        rows = int(rng.integers(2, 7))
        cols = int(rng.integers(max(2, -(-MIN_NODES // rows)), MAX_NODES // rows + 1))
        yield nx.grid_2d_graph(rows, cols)


def cores(rng: np.random.Generator, count: int) -> Iterator[nx.Graph]:
    "A small cyclic core with random trees hanging off some of its nodes"
    for _ in range(count):
        core_size = int(rng.integers(4, 13))
        graph = nx.cycle_graph(core_size)
        for _ in range(int(rng.integers(0, core_size // 2 + 1))):
            u, v = rng.choice(core_size, size=2, replace=False)
            graph.add_edge(int(u), int(v))
        budget = int(rng.integers(MIN_NODES, MAX_NODES + 1)) - core_size
        while budget > 0:
            size = int(min(budget, rng.integers(1, 9)))
            tree = nx.random_labeled_tree(size, seed=int(rng.integers(2**32))) if size > 1 else nx.empty_graph(1)
            offset = graph.number_of_nodes()
            graph.update(nx.relabel_nodes(tree, {n: n + offset for n in tree.nodes}))
            graph.add_edge(int(rng.integers(core_size)), offset)
            budget -= size
        yield graph


def random_connected(rng: np.random.Generator, count: int) -> Iterator[nx.Graph]:
    made = 0
    while made < count:
        n = int(rng.integers(MIN_NODES, MAX_NODES + 1))
        graph = nx.gnm_random_graph(n, int(n * rng.uniform(1.1, 1.6)), seed=int(rng.integers(2**32)))
        if nx.is_connected(graph):
            made += 1
            yield graph


def trees(rng: np.random.Generator, count: int) -> Iterator[nx.Graph]:
    for _ in range(count):
        yield nx.random_labeled_tree(int(rng.integers(MIN_NODES, MAX_NODES + 1)), seed=int(rng.integers(2**32)))


FAMILIES: Dict[str, Callable[[np.random.Generator, int], Iterator[nx.Graph]]] = {
    "cycles": cycles,
    "grids": grids,
    "cores": cores,
    "random": random_connected,
    "trees": trees,
}


def generate(family: str, count: int, seed: int, node_size: float) -> Iterator[Tuple[str, Graph]]:
    rng = np.random.default_rng([seed, list(FAMILIES).index(family)])
    for i, nx_graph in enumerate(FAMILIES[family](rng, count)):
        yield f"{family}-{i:03d}", to_graph(nx_graph, node_size)


if __name__ == "__main__":
    import argparse

    parser = argparse.ArgumentParser(description="Generate a synthetic graph corpus for layout comparisons")
    parser.add_argument(
        "families",
        type=str,
        nargs="+",
        help="Graph families to generate",
        choices=list(FAMILIES),
    )
    parser.add_argument(
        "-o",
        "--output",
        type=Path,
        help="Output directory for the JSON graphs",
        required=True,
    )
    parser.add_argument("-n", "--count", type=int, default=5, help="Graphs per family")
    parser.add_argument("-s", "--seed", type=int, default=42, help="Random seed")
    parser.add_argument("--node-size", type=float, default=20.0, help="Side of every node box")
    args = parser.parse_args()

    output_dir: Path = args.output
    output_dir.mkdir(parents=True, exist_ok=True)

    total = 0
    for family in args.families:
        for name, graph in tqdm(
            generate(family, args.count, args.seed, args.node_size), desc=f"Generating {family}", leave=False
        ):
            (output_dir / f"{name}.json").write_bytes(serialize_graph(graph, "json"))
            total += 1
        logger.info(f"Generated {args.count} {family} graphs")
    logger.success(f"Wrote {total} graphs to {output_dir}")
