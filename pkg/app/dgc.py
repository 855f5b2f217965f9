"""
Dynamic Graph Coloring repair subroutine.

Given a proper coloring of a rolled-back graph and the edges re-added since, the
monochromatic re-added edges form a conflict subgraph; recoloring a vertex cover of it
(within a color ceiling) removes every conflict. Covers are found with a bounded search
tree, so the cost is exponential only in the cover size.
"""
import os
from typing import Dict, FrozenSet, Iterator, List, Optional, Set, Tuple

from dotenv import load_dotenv
from pydantic import BaseModel, ConfigDict, model_validator

from app.coloring import flip_to_free, swap_colors, verify
from app.graph import Edge, Graph
from app.models import Coloring

load_dotenv()

COVER_LIMIT = int(os.getenv("DGC_COVER_LIMIT", 256))
# a blocked vertex only tries to free colors held by at most this many of its neighbors
INTERCHANGE_HOLDERS = int(os.getenv("DGC_INTERCHANGE_HOLDERS", 2))


class ImproperBaseColoringError(ValueError):
    pass


class SearchBudgetExceeded(Exception):
    pass


class SearchBudget:
    """Shared node counter for the bounded searches of one repair call."""

    def __init__(self, max_nodes: Optional[int] = None):
        self.max_nodes = max_nodes
        self.nodes = 0

    def tick(self):
        self.nodes += 1
        if self.max_nodes is not None and self.nodes > self.max_nodes:
            raise SearchBudgetExceeded(f"search stopped after {self.max_nodes} nodes")


class DgcInstance(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    base_graph: Graph
    target_graph: Graph
    base_coloring: Coloring
    edit_k: int
    increment_r: int
    target_colors: int

    @model_validator(mode="after")
    def _check_instance(self):
        if self.base_graph.vertex_count != self.target_graph.vertex_count:
            raise ValueError("Base and target graphs must share the vertex set.")
        if len(self.base_coloring.colors) != self.base_graph.vertex_count:
            raise ValueError("Base coloring does not cover the vertex set.")
        if not self.base_graph.edge_set <= self.target_graph.edge_set:
            raise ValueError("Target graph must contain every base edge.")
        added = self.target_graph.edge_count - self.base_graph.edge_count
        if added != self.edit_k:
            raise ValueError(f"edit_k={self.edit_k} but {added} edges were added.")
        if not 0 <= self.increment_r <= 2 * self.edit_k:
            raise ValueError(f"increment_r must be in [0, 2*edit_k], got {self.increment_r}.")
        if self.target_colors < 1:
            raise ValueError("target_colors must be positive.")
        return self


class ConflictSubgraph(BaseModel):
    conflict_edges: List[Tuple[int, int]]
    touched_vertices: List[int]

    def adjacency(self) -> Dict[int, Set[int]]:
        adj: Dict[int, Set[int]] = {v: set() for v in self.touched_vertices}
        for u, v in self.conflict_edges:
            adj[u].add(v)
            adj[v].add(u)
        return adj


def conflict_subgraph(inst: DgcInstance) -> ConflictSubgraph:
    """The re-added edges that are monochromatic under the base coloring, in target edge order."""
    if verify(inst.base_graph, inst.base_coloring):
        raise ImproperBaseColoringError("Base coloring is not proper on the base graph.")
    colors = inst.base_coloring.colors
    base_edges = inst.base_graph.edge_set
    conflicts = [
        (u, v)
        for u, v in inst.target_graph.edges
        if colors[u] == colors[v] and (u, v) not in base_edges
    ]
    touched = sorted({x for edge in conflicts for x in edge})
    return ConflictSubgraph(conflict_edges=conflicts, touched_vertices=touched)


# --- vertex cover search ---

def _matching_lower_bound(edges: List[Edge], chosen: FrozenSet[int] = frozenset()) -> int:
    """Size of a greedy maximal matching among edges not yet covered by `chosen`."""
    matched: Set[int] = set()
    size = 0
    for u, v in edges:
        if u in chosen or v in chosen or u in matched or v in matched:
            continue
        matched.add(u)
        matched.add(v)
        size += 1
    return size


def _without(adj: Dict[int, Set[int]], removed: Set[int]) -> Dict[int, Set[int]]:
    return {
        v: nbrs - removed
        for v, nbrs in adj.items()
        if v not in removed and len(nbrs - removed) > 0
    }


def _edges_of(adj: Dict[int, Set[int]]) -> List[Edge]:
    return sorted((u, v) for u, nbrs in adj.items() for v in nbrs if u < v)


def _cover_within(adj: Dict[int, Set[int]], k: int, budget: SearchBudget) -> Optional[Set[int]]:
    """Bounded search tree: a vertex cover of size <= k, or None."""
    budget.tick()
    taken: Set[int] = set()

    # reductions: degree-1 (take the neighbor) and degree > k (must be in any small cover)
    changed = True
    while changed and adj:
        changed = False
        for v in sorted(adj):
            nbrs = adj.get(v)
            if not nbrs:
                continue
            if len(nbrs) > k - len(taken):
                pick = {v}
            elif len(nbrs) == 1:
                pick = set(nbrs)
            else:
                continue
            taken |= pick
            if len(taken) > k:
                return None
            adj = _without(adj, pick)
            changed = True
            break

    if not adj:
        return taken
    budget_left = k - len(taken)
    edges = _edges_of(adj)
    if _matching_lower_bound(edges) > budget_left:
        return None

    v = min(adj, key=lambda x: (-len(adj[x]), x))
    nbrs = adj[v]
    found = _cover_within(_without(adj, {v}), budget_left - 1, budget)
    if found is not None:
        return taken | {v} | found
    if len(nbrs) <= budget_left:
        found = _cover_within(_without(adj, set(nbrs)), budget_left - len(nbrs), budget)
        if found is not None:
            return taken | set(nbrs) | found
    return None


def min_vertex_cover(
    h: ConflictSubgraph, max_k: int, budget: Optional[SearchBudget] = None
) -> Optional[FrozenSet[int]]:
    """
    Minimum vertex cover of the conflict edges if its size is <= max_k, else None.
    The size is located by binary search over the budget, each step a bounded search.
    """
    budget = budget or SearchBudget()
    if not h.conflict_edges:
        return frozenset()
    adj = h.adjacency()
    lo = _matching_lower_bound(h.conflict_edges)
    hi = min(max_k, len(h.conflict_edges), len(h.touched_vertices) - 1)
    if lo > hi:
        return None
    best = _cover_within(adj, hi, budget)
    if best is None:
        return None
    hi = len(best)
    while lo < hi:
        mid = (lo + hi) // 2
        found = _cover_within(adj, mid, budget)
        if found is None:
            lo = mid + 1
        else:
            best = found
            hi = len(found)
    return frozenset(best)


def _is_minimal(cover: Set[int], adj: Dict[int, Set[int]]) -> bool:
    return all(any(w not in cover for w in adj[v]) for v in cover)


def enumerate_covers(
    h: ConflictSubgraph,
    size_bound: int,
    limit: int = COVER_LIMIT,
    budget: Optional[SearchBudget] = None,
) -> Iterator[FrozenSet[int]]:
    """
    Yields distinct inclusion-minimal covers of size <= size_bound, smallest sizes first,
    at most `limit` of them. Within a size the order is the search order: the first
    uncovered edge (a, b) branches on "a in" before "a out, b in".
    """
    budget = budget or SearchBudget()
    smallest = min_vertex_cover(h, size_bound, budget)
    if smallest is None:
        return
    if not h.conflict_edges:
        yield frozenset()
        return

    adj = h.adjacency()
    edges = sorted(h.conflict_edges)
    yielded = 0

    def covers_of_size(size: int) -> Iterator[FrozenSet[int]]:
        def branch(chosen: FrozenSet[int], excluded: FrozenSet[int]) -> Iterator[FrozenSet[int]]:
            budget.tick()
            uncovered = next(((a, b) for a, b in edges if a not in chosen and b not in chosen), None)
            if uncovered is None:
                if len(chosen) == size and _is_minimal(chosen, adj):
                    yield chosen
                return
            if len(chosen) + _matching_lower_bound(edges, chosen) > size:
                return
            a, b = uncovered
            if a not in excluded:
                yield from branch(chosen | {a}, excluded)
            if b not in excluded:
                yield from branch(chosen | {b}, excluded | {a})

        yield from branch(frozenset(), frozenset())

    for size in range(len(smallest), min(size_bound, len(h.touched_vertices)) + 1):
        for cover in covers_of_size(size):
            yield cover
            yielded += 1
            if yielded >= limit:
                return


# --- repair ---

def _recolor(
    g: Graph,
    base: List[int],
    recolor: List[int],
    target_colors: int,
    budget: SearchBudget,
    max_changes: Optional[int] = None,
) -> Optional[List[int]]:
    """
    Backtracking over `recolor` (most constrained first). Without `max_changes` everything
    else stays fixed. With it, a vertex left with no free color may also take a color freed
    by a two-color interchange, as long as the vertices moved off their base color (the
    recolor list included) stay within `max_changes`.
    """
    colors = list(base)
    for v in recolor:
        colors[v] = 0
    adjacency = g.adjacency
    pinned = set(recolor)
    moved: Set[int] = set()

    def interchanges(v: int) -> Iterator[int]:
        census: Dict[int, int] = {}
        for w in adjacency[v]:
            census[colors[w]] = census.get(colors[w], 0) + 1
        holders = sorted((count, color) for color, count in census.items() if 1 <= color <= target_colors)
        for count, keep in holders:
            if count > INTERCHANGE_HOLDERS:
                break
            for other in range(1, target_colors + 1):
                if other == keep:
                    continue
                budget.tick()
                flipped = flip_to_free(adjacency, colors, v, keep, other)
                if flipped is None:
                    continue
                before = set(moved)
                for x in flipped:
                    if x in pinned:
                        continue
                    if colors[x] == base[x]:
                        moved.discard(x)
                    else:
                        moved.add(x)
                if len(pinned) + len(moved) <= max_changes:
                    yield keep
                swap_colors(colors, flipped, keep, other)
                moved.clear()
                moved.update(before)

    def place(idx: int) -> bool:
        budget.tick()
        if idx == len(recolor):
            return True
        v = recolor[idx]
        taken = {colors[w] for w in adjacency[v]}
        free = [color for color in range(1, target_colors + 1) if color not in taken]
        for color in free:
            colors[v] = color
            if place(idx + 1):
                return True
        if not free and max_changes is not None:
            for color in interchanges(v):
                colors[v] = color
                if place(idx + 1):
                    return True
                colors[v] = 0
        colors[v] = 0
        return False

    return colors if place(0) else None


def repair_labels(
    inst: DgcInstance,
    cover_limit: int = COVER_LIMIT,
    search_nodes: Optional[int] = None,
    interchange: bool = False,
) -> Optional[List[int]]:
    """
    Recolors one enumerated cover of the conflict subgraph plus the vertices whose base
    color exceeds target_colors; every other vertex keeps its base color unless
    `interchange` lets a blocked vertex swap a two-color component out of its way. Returns
    the raw labels (all <= target_colors, at most increment_r of them changed) or None.
    """
    h = conflict_subgraph(inst)
    base = inst.base_coloring.colors
    target = inst.target_colors
    forced = {v for v, color in enumerate(base) if color > target}

    if not h.conflict_edges and not forced:
        return list(base)

    bound = min(inst.increment_r - len(forced), len(h.conflict_edges))
    if bound < 0:
        return None

    g = inst.target_graph
    budget = SearchBudget(search_nodes)
    max_changes = inst.increment_r if interchange else None
    try:
        for cover in enumerate_covers(h, bound, cover_limit, budget):
            recolor = sorted(cover | forced, key=lambda v: (-g.degree(v), v))
            if len(recolor) > inst.increment_r:
                continue
            colors = _recolor(g, base, recolor, target, budget, max_changes)
            if colors is not None:
                return colors
    except SearchBudgetExceeded:
        return None
    return None


def dgc_solve(
    inst: DgcInstance,
    cover_limit: int = COVER_LIMIT,
    search_nodes: Optional[int] = None,
    interchange: bool = False,
) -> Optional[Coloring]:
    """
    Proper coloring of target_graph with at most target_colors colors that differs from
    base_coloring on at most increment_r vertices, or None when no enumerated cover works.
    The result is compacted to 1..used; compaction renames classes, the partition is the
    one the Hamming budget was checked on.
    """
    labels = repair_labels(inst, cover_limit, search_nodes, interchange)
    return None if labels is None else Coloring.from_labels(labels)
