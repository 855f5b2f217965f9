"""
Algorithm registry: every entry point used by the CLI, the bench harness and the API.
Every result is re-verified against the graph before it leaves this module.
"""
import time
from typing import Callable, Dict, Optional, Tuple

from app.coloring import assert_proper, deadline_from, greedy_interchange, greedy_lf
from app.graph import Graph
from app.models import Coloring, RepairLimits, RunStats, SolveResult
from app.turbo import default_limits, dyn_turbo_color, edge_greedy_color

Solver = Callable[[Graph, int, Optional[int], RepairLimits, bool], Tuple[Coloring, Optional[RunStats]]]


def _greedy_lf(g, seed, k_best, limits, verbose):
    return greedy_lf(g, seed, deadline_from(limits.time_limit_s)), None


def _greedy_interchange(g, seed, k_best, limits, verbose):
    return greedy_interchange(g, seed, deadline_from(limits.time_limit_s)), None


def _edge_greedy(g, seed, k_best, limits, verbose):
    return edge_greedy_color(g, seed, k_best, limits, verbose)


def _dyn_tc(g, seed, k_best, limits, verbose):
    return dyn_turbo_color(g, seed, k_best, limits, verbose)


ALGORITHMS: Dict[str, Solver] = {
    "greedy-lf": _greedy_lf,
    "greedy-interchange": _greedy_interchange,
    "edge-greedy": _edge_greedy,
    "dyn-tc": _dyn_tc,
}


def run_solver(
    algorithm: str,
    g: Graph,
    seed: int,
    k_best: Optional[int] = None,
    time_limit_s: Optional[float] = None,
    limits: Optional[RepairLimits] = None,
    verbose: bool = False,
) -> SolveResult:
    """Runs one algorithm and verifies the coloring; raises ColoringInvariantError on a bad result."""
    if algorithm not in ALGORITHMS:
        raise ValueError(f"Unknown algorithm {algorithm!r}; choose from {', '.join(ALGORITHMS)}")
    limits = limits or default_limits()
    if time_limit_s is not None:
        limits = limits.model_copy(update={"time_limit_s": time_limit_s})

    started = time.perf_counter()
    coloring, stats = ALGORITHMS[algorithm](g, seed, k_best, limits, verbose)
    time_ms = int((time.perf_counter() - started) * 1000)

    assert_proper(g, coloring, context=f"{algorithm} (seed {seed})")
    return SolveResult(algorithm=algorithm, seed=seed, coloring=coloring, time_ms=time_ms, stats=stats)
