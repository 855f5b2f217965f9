"""
Immutable simple undirected graph plus the elementary queries every solver shares.
Vertices are 0-based internally; DIMACS 1-based ids are converted in app/parser.py.
"""
from typing import FrozenSet, Iterable, List, Optional, Tuple

import networkx as nx
import numpy as np

Edge = Tuple[int, int]


class InvalidGraphError(ValueError):
    pass


class EmptyGraphError(ValueError):
    pass


class Graph:
    """Simple undirected graph: no loops, no duplicate edges, edges stored as (u, v) with u < v."""

    __slots__ = ("vertex_count", "edges", "adjacency", "_edge_set", "_edge_array")

    def __init__(self, vertex_count: int, edges: Iterable[Edge]):
        if vertex_count < 0:
            raise InvalidGraphError(f"vertex_count must be non-negative, got {vertex_count}")
        self.vertex_count = vertex_count

        ordered: List[Edge] = []
        seen = set()
        neighbors: List[set] = [set() for _ in range(vertex_count)]
        for u, v in edges:
            if u == v:
                raise InvalidGraphError(f"Self-loop on vertex {u}")
            if not (0 <= u < vertex_count and 0 <= v < vertex_count):
                raise InvalidGraphError(f"Edge ({u}, {v}) has an endpoint outside [0, {vertex_count})")
            edge = (u, v) if u < v else (v, u)
            if edge in seen:
                raise InvalidGraphError(f"Duplicate edge {edge}")
            seen.add(edge)
            ordered.append(edge)
            neighbors[u].add(v)
            neighbors[v].add(u)

        self.edges: Tuple[Edge, ...] = tuple(ordered)
        self.adjacency: Tuple[FrozenSet[int], ...] = tuple(frozenset(s) for s in neighbors)
        self._edge_set: FrozenSet[Edge] = frozenset(seen)
        self._edge_array: Optional[np.ndarray] = None

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    @property
    def edge_set(self) -> FrozenSet[Edge]:
        return self._edge_set

    def has_edge(self, u: int, v: int) -> bool:
        return ((u, v) if u < v else (v, u)) in self._edge_set

    def degree(self, v: int) -> int:
        return len(self.adjacency[v])

    def degrees(self) -> np.ndarray:
        return np.fromiter((len(nb) for nb in self.adjacency), dtype=np.int64, count=self.vertex_count)

    def edge_array(self) -> np.ndarray:
        """(m, 2) int array of the edge list, cached."""
        if self._edge_array is None:
            arr = np.array(self.edges, dtype=np.int64).reshape(-1, 2)
            arr.setflags(write=False)
            self._edge_array = arr
        return self._edge_array

    def subgraph_with_edges(self, edges: Iterable[Edge]) -> "Graph":
        """Same vertex set, a subset of the edges (used for rollback prefixes)."""
        return Graph(self.vertex_count, edges)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return self.vertex_count == other.vertex_count and self.edges == other.edges

    def __hash__(self) -> int:
        return hash((self.vertex_count, self.edges))

    def __repr__(self):
        return f"<Graph(n={self.vertex_count}, m={self.edge_count})>"


def degree(g: Graph, v: int) -> int:
    if not 0 <= v < g.vertex_count:
        raise IndexError(f"Vertex {v} is not in [0, {g.vertex_count})")
    return g.degree(v)


def max_degree(g: Graph) -> int:
    if g.vertex_count == 0:
        raise EmptyGraphError("max_degree is undefined on a graph with no vertices")
    return max(len(nb) for nb in g.adjacency)


def write_dimacs(g: Graph, comment: Optional[str] = None) -> str:
    """DIMACS .col text: comment lines, `p edge n m`, then 1-based `e u v` lines with u < v."""
    lines = []
    if comment:
        lines.extend(f"c {line}" for line in comment.splitlines())
    lines.append(f"p edge {g.vertex_count} {g.edge_count}")
    lines.extend(f"e {u + 1} {v + 1}" for u, v in g.edges)
    return "\n".join(lines) + "\n"


def from_networkx(nx_graph: nx.Graph) -> Graph:
    """Integer nodes 0..n-1 keep their ids; any other labeling is renumbered in node order."""
    n = nx_graph.number_of_nodes()
    if set(nx_graph.nodes) != set(range(n)):
        nx_graph = nx.convert_node_labels_to_integers(nx_graph)
    return Graph(n, nx_graph.edges())


def random_graph(n: int, p: float, seed: int) -> Graph:
    """G(n, p) random graph, deterministic for a given seed."""
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"Edge probability must be in [0, 1], got {p}")
    return from_networkx(nx.gnp_random_graph(n, p, seed=seed))


# Small named families for fixtures and sanity runs.

def complete_graph(n: int) -> Graph:
    return from_networkx(nx.complete_graph(n))


def cycle_graph(n: int) -> Graph:
    return from_networkx(nx.cycle_graph(n))


def path_graph(n: int) -> Graph:
    return from_networkx(nx.path_graph(n))


def star_graph(leaves: int) -> Graph:
    """K(1, leaves) with the center at vertex 0."""
    return from_networkx(nx.star_graph(leaves))


def crown_graph(half: int) -> Graph:
    """K(half, half) minus a perfect matching; a_i = 2i, b_i = 2i + 1."""
    crown = nx.complete_bipartite_graph(half, half)
    crown.remove_edges_from((i, half + i) for i in range(half))
    sides = {i: 2 * i for i in range(half)}
    sides.update({half + i: 2 * i + 1 for i in range(half)})
    return from_networkx(nx.relabel_nodes(crown, sides))


def petersen_graph() -> Graph:
    return from_networkx(nx.petersen_graph())
