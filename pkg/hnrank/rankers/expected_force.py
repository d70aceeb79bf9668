"""Expected Force: entropy of cluster out-degrees after two transmissions."""

from functools import lru_cache
from typing import List, Union

import networkx as nx
import numpy as np
from scipy.stats import entropy

from ..errors import InsufficientNeighborhoodError
from ..graph import WeightedDigraph


@lru_cache(maxsize=8)
def undirected_projection(graph: WeightedDigraph) -> nx.Graph:
    """Simple undirected, unweighted view of the graph without self-loops."""
    G = nx.Graph()
    G.add_nodes_from(range(graph.node_count))
    G.add_edges_from(
        (int(s), int(t))
        for s, t, w in zip(graph.sources, graph.targets, graph.weights)
        if s != t and w > 0.0
    )
    return G


def _cluster_out_degree(G: nx.Graph, cluster: frozenset) -> int:
    return sum(1 for node in cluster for nbr in G.adj[node] if nbr not in cluster)


def cluster_out_degrees(G: nx.Graph, seed: int) -> List[int]:
    """Out-degree of the cluster reached by every ordered 2-transmission sequence.

    The first event crosses an edge from the seed, the second crosses any
    edge leaving {seed, first}; each edge crossed counts as its own sequence.
    """
    degrees: List[int] = []
    for first in G.adj[seed]:
        infected = (seed, first)
        for carrier in infected:
            for second in G.adj[carrier]:
                if second in infected:
                    continue
                degrees.append(_cluster_out_degree(G, frozenset((seed, first, second))))
    return degrees


def expected_force(graph: WeightedDigraph, seed_node: Union[int, str]) -> float:
    """ExF(i) = -sum_j dbar_j log dbar_j over all 2-transmission clusters from i."""
    seed = int(graph.indices_of([seed_node])[0]) if isinstance(seed_node, str) else int(seed_node)
    label = graph.node_ids[seed]
    degrees = cluster_out_degrees(undirected_projection(graph), seed)

    if not degrees:
        raise InsufficientNeighborhoodError(
            f"insufficient neighborhood: node {label!r} reaches fewer than 2 nodes in 2 transmissions"
        )
    if len(degrees) == 1:
        return 0.0
    total = sum(degrees)
    if total == 0:
        raise InsufficientNeighborhoodError(
            f"insufficient neighborhood: every cluster seeded at {label!r} has out-degree 0"
        )
    return float(entropy(np.asarray(degrees, dtype=float)))


def expected_force_all(graph: WeightedDigraph) -> np.ndarray:
    """ExF for every node; NaN where the neighbourhood is insufficient."""
    values = np.full(graph.node_count, np.nan)
    for node in range(graph.node_count):
        try:
            values[node] = expected_force(graph, node)
        except InsufficientNeighborhoodError:
            continue
    return values
