"""
Coloring verification and the classical vertex-order greedy baselines:
Largest-Degree-First and Greedy-With-Interchange, plus an exact brute-force oracle.
"""
import time
from itertools import combinations
from typing import Iterable, List, Optional, Sequence, Set

import numpy as np

from app.graph import Edge, EmptyGraphError, Graph
from app.models import Coloring

BRUTE_FORCE_LIMIT = 14


class ColoringSizeError(ValueError):
    pass


class GraphTooLargeError(ValueError):
    pass


class ColoringInvariantError(RuntimeError):
    """A solver produced an improper or malformed coloring. Always a bug."""


class SolverTimeout(Exception):
    pass


def deadline_from(time_limit_s: Optional[float]) -> Optional[float]:
    return None if time_limit_s is None else time.perf_counter() + time_limit_s


def check_deadline(deadline: Optional[float]):
    if deadline is not None and time.perf_counter() > deadline:
        raise SolverTimeout("time limit reached")


def verify(g: Graph, c: Coloring, edge_subset: Optional[Iterable[int]] = None) -> List[Edge]:
    """
    Returns every edge (from edge_subset, given as indices into g.edges, or from all edges)
    whose endpoints share a color. An empty list means the coloring is proper on that edge set.
    """
    if len(c.colors) != g.vertex_count:
        raise ColoringSizeError(
            f"Coloring covers {len(c.colors)} vertices but the graph has {g.vertex_count}"
        )
    edges = g.edge_array()
    if edge_subset is not None:
        indices = np.fromiter(edge_subset, dtype=np.int64)
        edges = edges[indices] if indices.size else edges[:0]
    if edges.shape[0] == 0:
        return []
    colors = np.asarray(c.colors, dtype=np.int64)
    clash = colors[edges[:, 0]] == colors[edges[:, 1]]
    return [(int(u), int(v)) for u, v in edges[clash]]


def assert_proper(g: Graph, c: Coloring, context: str = "", edge_subset: Optional[Iterable[int]] = None):
    conflicts = verify(g, c, edge_subset)
    if conflicts:
        raise ColoringInvariantError(
            f"{context or 'coloring'} is improper: {len(conflicts)} conflicting edge(s), first {conflicts[:3]}"
        )


def normalize(labels: Sequence[int]) -> Coloring:
    return Coloring.from_labels(list(labels))


def write_assignment(c: Coloring) -> str:
    """One `<1-based vertex> <color>` line per vertex, ascending."""
    return "".join(f"{v + 1} {color}\n" for v, color in enumerate(c.colors))


def lf_order(g: Graph, seed: int) -> List[int]:
    """Non-increasing degree; ties broken by a seeded shuffle applied before the stable sort."""
    rng = np.random.default_rng(seed)
    shuffled = rng.permutation(g.vertex_count)
    degrees = g.degrees()[shuffled]
    return shuffled[np.argsort(-degrees, kind="stable")].tolist()


def _smallest_free(adjacency, colors: List[int], v: int) -> int:
    taken = {colors[w] for w in adjacency[v]}
    color = 1
    while color in taken:
        color += 1
    return color


def greedy_order(g: Graph, order: Sequence[int], deadline: Optional[float] = None) -> Coloring:
    """Each vertex, in order, takes the smallest color absent from its colored neighbors."""
    colors = [0] * g.vertex_count
    for step, v in enumerate(order):
        if step & 255 == 0:
            check_deadline(deadline)
        colors[v] = _smallest_free(g.adjacency, colors, v)
    return Coloring.model_construct(colors=colors, used=max(colors, default=0))


def greedy_lf(g: Graph, seed: int, deadline: Optional[float] = None) -> Coloring:
    return greedy_order(g, lf_order(g, seed), deadline)


def flip_to_free(adjacency, colors: List[int], v: int, keep: int, other: int) -> Optional[Set[int]]:
    """
    Tries to free `keep` around v by swapping keep/other on the bichromatic components
    of v's keep-colored neighbors. Returns the flipped vertices, or None (colors untouched)
    when one of those components reaches an other-colored neighbor of v. Flipping the
    returned set again undoes the swap.
    """
    blockers = {w for w in adjacency[v] if colors[w] == other}
    component: Set[int] = set()
    stack = [w for w in adjacency[v] if colors[w] == keep]
    while stack:
        x = stack.pop()
        if x in component:
            continue
        if x in blockers:
            return None
        component.add(x)
        for y in adjacency[x]:
            if y not in component and (colors[y] == keep or colors[y] == other):
                stack.append(y)
    swap_colors(colors, component, keep, other)
    return component


def swap_colors(colors: List[int], vertices: Iterable[int], a: int, b: int):
    for x in vertices:
        colors[x] = b if colors[x] == a else a


def interchange_order(g: Graph, order: Sequence[int], deadline: Optional[float] = None) -> Coloring:
    """
    Greedy over `order`, but a vertex that would open a new color first tries a two-color
    interchange (pairs in ascending order, first success wins). Never worse than plain
    greedy over the same order.
    """
    adjacency = g.adjacency
    colors = [0] * g.vertex_count
    used = 0
    for step, v in enumerate(order):
        if step & 63 == 0:
            check_deadline(deadline)
        color = _smallest_free(adjacency, colors, v)
        if color > used and used >= 2:
            for a, b in combinations(range(1, used + 1), 2):
                if flip_to_free(adjacency, colors, v, a, b) is not None:
                    color = a
                    break
                if flip_to_free(adjacency, colors, v, b, a) is not None:
                    color = b
                    break
        colors[v] = color
        used = max(used, color)

    interchanged = Coloring.model_construct(colors=colors, used=used)
    plain = greedy_order(g, order, deadline)
    return plain if plain.used < interchanged.used else interchanged


def greedy_interchange(g: Graph, seed: int, deadline: Optional[float] = None) -> Coloring:
    return interchange_order(g, lf_order(g, seed), deadline)


def _colorable(adjacency, order: List[int], k: int) -> bool:
    colors = [0] * len(adjacency)

    def place(idx: int, highest: int) -> bool:
        if idx == len(order):
            return True
        v = order[idx]
        taken = {colors[w] for w in adjacency[v]}
        # symmetry: a fresh color is only ever the next unused one
        for color in range(1, min(k, highest + 1) + 1):
            if color in taken:
                continue
            colors[v] = color
            if place(idx + 1, max(highest, color)):
                return True
        colors[v] = 0
        return False

    return place(0, 0)


def brute_force_chromatic(g: Graph) -> int:
    """Exact chromatic number by trying k = 1, 2, ... with backtracking. Small graphs only."""
    if g.vertex_count > BRUTE_FORCE_LIMIT:
        raise GraphTooLargeError(
            f"brute_force_chromatic is limited to {BRUTE_FORCE_LIMIT} vertices, got {g.vertex_count}"
        )
    if g.vertex_count == 0:
        raise EmptyGraphError("brute_force_chromatic needs at least one vertex")
    order = sorted(range(g.vertex_count), key=lambda v: (-g.degree(v), v))
    k = 1
    while not _colorable(g.adjacency, order, k):
        k += 1
    return k
