"""
Turbo-charged incremental greedy coloring.

Edges are added one at a time to an initially edge-less, single-colored graph. A conflict
is resolved by recoloring an endpoint with an existing color when possible, otherwise by
opening a new color. After each new color the run checks a dynamic moment of regret
(colors arriving faster than the budgeted edges-per-color rate); when it fires, the run
rolls back to the end of the last stable interval and asks the DGC subroutine to absorb
the rolled-back edges with one color fewer.
"""
import math
import os
import sys
import time
from typing import Dict, List, Optional, Set, Tuple

import numpy as np
from dotenv import load_dotenv
from pydantic import BaseModel, model_validator

from app.coloring import (
    ColoringInvariantError,
    assert_proper,
    check_deadline,
    deadline_from,
    greedy_lf,
)
from app.dgc import DgcInstance, dgc_solve
from app.graph import Edge, Graph
from app.models import Coloring, RepairLimits, RunStats

load_dotenv()

MAX_EDIT_K = int(os.getenv("TURBO_MAX_EDIT_K", 64))
SEARCH_NODES = int(os.getenv("TURBO_SEARCH_NODES", 20000))


def default_limits(**overrides) -> RepairLimits:
    settings = {"max_edit_k": MAX_EDIT_K, "search_nodes": SEARCH_NODES}
    settings.update(overrides)
    return RepairLimits(**settings)


class EdgeSchedule(BaseModel):
    order: List[int]
    seed: int

    @model_validator(mode="after")
    def _check_permutation(self):
        if sorted(self.order) != list(range(len(self.order))):
            raise ValueError("Edge schedule must be a permutation of the edge indices.")
        return self


class RegretTracker(BaseModel):
    """
    color_events[i - 1] is the edge-addition index at which color i was first assigned
    (color 1 at 0). An accepted repair down to c colors keeps the first c events, so the
    list stays strictly increasing and the stable interval is read from real history.
    """
    color_events: List[int]
    edges_added: int = 0
    total_edges: int
    k_best: int
    repair_point: Optional[int] = None

    @model_validator(mode="after")
    def _check_tracker(self):
        if self.k_best < 1:
            raise ValueError("k_best must be at least 1.")
        if self.edges_added > self.total_edges:
            raise ValueError("edges_added cannot exceed total_edges.")
        return self

    @property
    def rate(self) -> float:
        """Acceptable edges per color: |E| / k_best."""
        return self.total_edges / self.k_best

    def record_color(self, edge_index: int):
        self.color_events.append(edge_index)

    def rebase(self, repair_index: int, colors: int):
        del self.color_events[colors:]
        self.repair_point = repair_index


class CheckpointLog(BaseModel):
    """
    Full snapshots at color events plus per-edge endpoint recolor records between them;
    any index from `origin` on can be reconstructed exactly. An accepted repair replaces
    the snapshot at its own index; earlier history is untouched and still proper on its
    prefix.
    """
    origin: int
    snapshots: Dict[int, List[int]]
    diffs: Dict[int, List[Tuple[int, int, int]]] = {}

    @classmethod
    def start(cls, origin: int, colors: List[int]) -> "CheckpointLog":
        return cls(origin=origin, snapshots={origin: list(colors)}, diffs={})

    def snapshot(self, index: int, colors: List[int]):
        self.snapshots[index] = list(colors)

    def record(self, index: int, vertex: int, old: int, new: int):
        self.diffs.setdefault(index, []).append((vertex, old, new))

    def restore(self, index: int) -> List[int]:
        if index < self.origin:
            raise ValueError(f"Checkpoint log starts at edge {self.origin}, cannot restore {index}.")
        base = max(k for k in self.snapshots if k <= index)
        colors = list(self.snapshots[base])
        for step in range(base + 1, index + 1):
            for vertex, _, new in self.diffs.get(step, ()):
                colors[vertex] = new
        return colors


def schedule_edges(g: Graph, seed: int) -> EdgeSchedule:
    """
    Edges by (larger endpoint degree desc, smaller endpoint degree desc, seeded tie-break).
    """
    if g.edge_count == 0:
        return EdgeSchedule(order=[], seed=seed)
    degrees = g.degrees()
    ends = g.edge_array()
    du, dv = degrees[ends[:, 0]], degrees[ends[:, 1]]
    high, low = np.maximum(du, dv), np.minimum(du, dv)
    tie_break = np.random.default_rng(seed).permutation(g.edge_count)
    order = np.lexsort((tie_break, -low, -high))
    return EdgeSchedule(order=order.tolist(), seed=seed)


def add_edge_greedy(adjacency: List[Set[int]], c: Coloring, e: Edge) -> Tuple[Coloring, bool]:
    """
    Adds e to the partial graph (in place). A monochromatic edge first recolors u with the
    smallest existing color free in its neighborhood, then v, and only then opens color
    c.used + 1 on u. `c.used` counts opened colors here; a label can be transiently empty.
    """
    u, v = e
    adjacency[u].add(v)
    adjacency[v].add(u)
    colors = c.colors
    if colors[u] != colors[v]:
        return c, False

    for x in (u, v):
        taken = {colors[w] for w in adjacency[x]}
        for color in range(1, c.used + 1):
            if color not in taken:
                colors[x] = color
                return c, False

    c.used += 1
    colors[u] = c.used
    return c, True


def regret_metric(t: RegretTracker, current_colors: int) -> float:
    """m = min over colors i < c of n_i / (c - i), n_i = edges added since color i appeared."""
    if current_colors <= 1:
        return math.inf
    terms = [
        (t.edges_added - t.color_events[i - 1]) / (current_colors - i)
        for i in range(1, min(current_colors, len(t.color_events) + 1))
    ]
    return min(terms) if terms else math.inf


def is_moment_of_regret(t: RegretTracker, current_colors: int) -> bool:
    return regret_metric(t, current_colors) < t.total_edges / t.k_best


def rollback_point(t: RegretTracker, log: CheckpointLog) -> int:
    """
    Right end of the stable interval: the run of colors ends at the last gap between
    consecutive color events that is at least |E|/k_best; rewind to just before the next
    color event. Falls back to the latest accepted repair, else 0, and never rewinds past
    the start of the checkpoint log.
    """
    events = t.color_events
    rate = t.rate
    point = None
    for i in range(len(events) - 2, -1, -1):
        if events[i + 1] - events[i] >= rate:
            point = events[i + 1] - 1
            break
    if point is None:
        point = t.repair_point if t.repair_point is not None else 0
    return max(point, log.origin)


class TurboRun:
    """One sequential run over a fixed edge schedule."""

    def __init__(
        self,
        g: Graph,
        seed: int,
        k_best: int,
        limits: Optional[RepairLimits] = None,
        verbose: bool = False,
    ):
        self.g = g
        self.seed = seed
        self.k_best = max(1, k_best)
        self.limits = limits or default_limits()
        self.verbose = verbose

        self.schedule = schedule_edges(g, seed)
        self.edges: List[Edge] = [g.edges[idx] for idx in self.schedule.order]
        self.adjacency: List[Set[int]] = [set() for _ in range(g.vertex_count)]
        self.coloring = Coloring.uniform(g.vertex_count)
        self.edges_added = 0

        self.tracker = RegretTracker(color_events=[0], total_edges=len(self.edges), k_best=self.k_best)
        self.log = CheckpointLog.start(0, self.coloring.colors)
        self.stats = RunStats()
        self._attempted: Set[Tuple[int, int]] = set()
        self._deadline = deadline_from(self.limits.time_limit_s)
        self._audit_at = self._audit_sample()

    def _say(self, message: str):
        if self.verbose:
            print(message, file=sys.stderr)

    def _audit_sample(self) -> Set[int]:
        steps = min(self.limits.audit_steps, len(self.edges))
        if steps == 0:
            return set()
        rng = np.random.default_rng(self.seed)
        return set((rng.choice(len(self.edges), size=steps, replace=False) + 1).tolist())

    def _audit(self, context: str):
        assert_proper(
            self.g,
            self.coloring,
            context=f"{context} after {self.edges_added} edges",
            edge_subset=self.schedule.order[: self.edges_added],
        )

    def add_next_edge(self) -> bool:
        """Adds the next scheduled edge; returns True when a new color was opened."""
        u, v = self.edges[self.edges_added]
        colors = self.coloring.colors
        old_u, old_v = colors[u], colors[v]
        _, color_added = add_edge_greedy(self.adjacency, self.coloring, (u, v))
        self.edges_added += 1
        index = self.edges_added

        for vertex, old in ((u, old_u), (v, old_v)):
            if colors[vertex] != old:
                self.log.record(index, vertex, old, colors[vertex])
        self.tracker.edges_added = index
        if color_added:
            self.tracker.record_color(index)
            self.log.snapshot(index, colors)
        return color_added

    def _repair(self, j: int) -> Optional[Coloring]:
        i = self.edges_added
        base_colors = self.log.restore(j)
        edit_k = i - j
        inst = DgcInstance(
            base_graph=self.g.subgraph_with_edges(self.edges[:j]),
            target_graph=self.g.subgraph_with_edges(self.edges[:i]),
            base_coloring=Coloring.model_construct(colors=base_colors, used=max(base_colors, default=0)),
            edit_k=edit_k,
            increment_r=2 * edit_k,
            target_colors=self.coloring.used - 1,
        )
        return dgc_solve(
            inst,
            cover_limit=self.limits.cover_limit,
            search_nodes=self.limits.search_nodes,
            interchange=self.limits.interchange,
        )

    def handle_regret(self):
        current = self.coloring.used
        if not is_moment_of_regret(self.tracker, current):
            return
        self.stats.regret_events += 1
        if not self.limits.enabled or self.stats.rollbacks_attempted >= self.limits.attempt_cap(self.k_best):
            return

        i = self.edges_added
        j = max(rollback_point(self.tracker, self.log), i - self.limits.max_edit_k)
        key = (j, current - 1)
        if key in self._attempted:
            return
        self._attempted.add(key)
        self.stats.rollbacks_attempted += 1

        repaired = self._repair(j)
        if repaired is None or repaired.used >= current:
            self._say(f"🔄 edge {i}: rollback to {j} could not drop below {current} colors")
            return

        self.coloring = Coloring.model_construct(colors=list(repaired.colors), used=repaired.used)
        self.tracker.rebase(i, repaired.used)
        self.log.snapshot(i, self.coloring.colors)
        self.stats.rollbacks_accepted += 1
        self._say(f"✅ edge {i}: rollback to {j} repaired {current} -> {repaired.used} colors")
        if self.limits.audit_steps:
            self._audit("repair")

    def run(self) -> Tuple[Coloring, RunStats]:
        started = time.perf_counter()
        total = len(self.edges)
        while self.edges_added < total:
            if self.edges_added & 255 == 0:
                check_deadline(self._deadline)
            color_added = self.add_next_edge()
            if color_added:
                if self.limits.audit_steps:
                    self._audit("color event")
                self.handle_regret()
            elif self.edges_added in self._audit_at:
                self._audit("spot check")

        final = Coloring.from_labels(self.coloring.colors)
        if final.used > self.coloring.used:
            raise ColoringInvariantError("Normalization increased the color count.")
        assert_proper(self.g, final, context="final coloring")

        self.stats.final_colors = final.used
        self.stats.edge_additions = self.edges_added
        self.stats.elapsed = time.perf_counter() - started
        self._say(
            f"📊 {final.used} colors, {self.stats.regret_events} regret events, "
            f"{self.stats.rollbacks_accepted}/{self.stats.rollbacks_attempted} repairs accepted"
        )
        return final, RunStats.model_validate(self.stats.model_dump())


def dyn_turbo_color(
    g: Graph,
    seed: int,
    k_best: Optional[int] = None,
    limits: Optional[RepairLimits] = None,
    verbose: bool = False,
) -> Tuple[Coloring, RunStats]:
    """Full turbo run. Without k_best the LF greedy color count for the same seed is used."""
    if k_best is None:
        k_best = greedy_lf(g, seed).used
    return TurboRun(g, seed, k_best, limits, verbose).run()


def edge_greedy_color(
    g: Graph,
    seed: int,
    k_best: Optional[int] = None,
    limits: Optional[RepairLimits] = None,
    verbose: bool = False,
) -> Tuple[Coloring, RunStats]:
    """The same edge-by-edge loop with the repair subroutine switched off."""
    limits = (limits or default_limits()).model_copy(update={"enabled": False})
    if k_best is None:
        k_best = greedy_lf(g, seed).used
    return TurboRun(g, seed, k_best, limits, verbose).run()
