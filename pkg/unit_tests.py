# unit_tests.py
import math
import sys
from itertools import combinations

import networkx as nx
import numpy as np
import pytest
from pydantic import ValidationError

from app.coloring import (
    ColoringSizeError,
    GraphTooLargeError,
    brute_force_chromatic,
    greedy_interchange,
    greedy_lf,
    greedy_order,
    interchange_order,
    lf_order,
    normalize,
    verify,
    write_assignment,
)
from app.dgc import (
    ConflictSubgraph,
    DgcInstance,
    ImproperBaseColoringError,
    SearchBudget,
    SearchBudgetExceeded,
    conflict_subgraph,
    dgc_solve,
    enumerate_covers,
    min_vertex_cover,
    repair_labels,
)
from app.graph import (
    EmptyGraphError,
    Graph,
    InvalidGraphError,
    complete_graph,
    crown_graph,
    cycle_graph,
    degree,
    from_networkx,
    max_degree,
    path_graph,
    petersen_graph,
    random_graph,
    star_graph,
    write_dimacs,
)
from app.models import Coloring, RunStats
from app.parser import (
    AssignmentParseError,
    DimacsParseError,
    DuplicateProblemLineError,
    EndpointOutOfRangeError,
    MalformedLineError,
    MissingProblemLineError,
    SelfLoopError,
    load_dimacs,
    parse_assignment,
    parse_dimacs,
    parse_dimacs_with_report,
)
from app.solvers import ALGORITHMS, run_solver
from app.turbo import (
    CheckpointLog,
    EdgeSchedule,
    RegretTracker,
    TurboRun,
    add_edge_greedy,
    default_limits,
    dyn_turbo_color,
    edge_greedy_color,
    is_moment_of_regret,
    regret_metric,
    rollback_point,
    schedule_edges,
)

K3_TEXT = "p edge 3 3\ne 1 2\ne 2 3\ne 1 3\n"


def _coloring(colors):
    return Coloring(colors=colors, used=max(colors, default=0))


# --- graph-core ---

def test_parse_triangle():
    print("\n--- 🧪 Testing DIMACS parsing ---")
    g = parse_dimacs(K3_TEXT)
    assert g.vertex_count == 3 and g.edge_count == 3, "K3 should have 3 vertices and 3 edges"
    assert g.edges == ((0, 1), (1, 2), (0, 2)), "Edges keep file order and become 0-based"
    print("✅ Triangle parsed.")


def test_parse_errors_are_distinct():
    with pytest.raises(EndpointOutOfRangeError) as err:
        parse_dimacs("p edge 2 1\ne 1 3\n")
    assert err.value.line_number == 2
    with pytest.raises(MissingProblemLineError):
        parse_dimacs("c nothing here\ne 1 2\n")
    with pytest.raises(MissingProblemLineError):
        parse_dimacs("c only comments\n")
    with pytest.raises(DuplicateProblemLineError):
        parse_dimacs("p edge 2 1\np edge 2 1\ne 1 2\n")
    with pytest.raises(SelfLoopError):
        parse_dimacs("p edge 2 1\ne 2 2\n")
    with pytest.raises(MalformedLineError):
        parse_dimacs("p edge 2 1\ne 1 x\n")
    assert issubclass(SelfLoopError, DimacsParseError)


def test_parse_merges_duplicate_edges():
    g, report = parse_dimacs_with_report("c dup\np edge 3 4\ne 1 2\ne 2 1\ne 1 2\ne 2 3\nx ignored\n")
    assert g.edges == ((0, 1), (1, 2)), "Reversed and repeated edges collapse to the first occurrence"
    assert report.duplicate_edges == 2
    assert report.declared_edges == 4 and report.distinct_edges == 2
    assert report.ignored_lines == 1


def test_parse_is_deterministic_and_writer_agrees():
    g = random_graph(15, 0.4, seed=3)
    text = write_dimacs(g, comment="fixture")
    assert text.startswith("c fixture\np edge 15 ")
    assert parse_dimacs(text) == parse_dimacs(text) == g


def test_load_missing_file_is_a_parse_error(tmp_path):
    with pytest.raises(DimacsParseError):
        load_dimacs(tmp_path / "missing.col")


def test_graph_rejects_bad_edges():
    with pytest.raises(InvalidGraphError):
        Graph(2, [(0, 0)])
    with pytest.raises(InvalidGraphError):
        Graph(2, [(0, 1), (1, 0)])
    with pytest.raises(InvalidGraphError):
        Graph(2, [(0, 2)])


def test_degree_queries():
    print("\n--- 🧪 Testing degree queries ---")
    k3, star, empty = complete_graph(3), star_graph(4), Graph(4, [])
    assert all(degree(k3, v) == 2 for v in range(3))
    assert degree(star, 0) == 4
    assert degree(empty, 2) == 0
    assert max_degree(k3) == 2
    assert max_degree(path_graph(4)) == 2
    assert max_degree(star) == 4
    with pytest.raises(EmptyGraphError):
        max_degree(Graph(0, []))
    with pytest.raises(IndexError):
        degree(k3, 3)
    print("✅ Degree queries passed.")


def test_random_graph_is_seeded():
    assert random_graph(20, 0.5, seed=7) == random_graph(20, 0.5, seed=7)
    assert random_graph(20, 0.5, seed=7) != random_graph(20, 0.5, seed=8)
    assert random_graph(6, 1.0, seed=1).edge_count == 15
    assert random_graph(6, 0.0, seed=1).edge_count == 0


def test_from_networkx_keeps_or_renumbers_nodes():
    grotzsch = from_networkx(nx.mycielski_graph(4))
    assert (grotzsch.vertex_count, grotzsch.edge_count) == (11, 20)
    assert brute_force_chromatic(grotzsch) == 4
    assert brute_force_chromatic(from_networkx(nx.chvatal_graph())) == 4

    labeled = from_networkx(nx.Graph([("a", "b"), ("b", "c")]))
    assert labeled.vertex_count == 3 and labeled.edge_set == {(0, 1), (1, 2)}
    crown = crown_graph(3)
    assert not crown.has_edge(0, 1) and crown.has_edge(0, 3) and crown.edge_count == 6


# --- coloring-engine ---

def test_coloring_model_enforces_contiguous_colors():
    with pytest.raises(ValidationError):
        Coloring(colors=[1, 3], used=2)
    with pytest.raises(ValidationError):
        Coloring(colors=[0, 1], used=1)
    assert normalize([5, 2, 5, 9]).colors == [2, 1, 2, 3]
    assert normalize([5, 2, 5, 9]).used == 3


def test_verify_examples():
    print("\n--- 🧪 Testing verify ---")
    k3 = complete_graph(3)
    assert verify(k3, _coloring([1, 2, 3])) == []
    assert verify(k3, _coloring([1, 1, 2])) == [(0, 1)]
    assert verify(k3, Coloring.uniform(3), edge_subset=[]) == []
    assert verify(k3, _coloring([1, 1, 2]), edge_subset=[1, 2]) == []
    with pytest.raises(ColoringSizeError):
        verify(k3, _coloring([1, 2]))
    print("✅ verify examples passed.")


def test_assignment_format():
    c = _coloring([1, 2, 1])
    text = write_assignment(c)
    assert text == "1 1\n2 2\n3 1\n"
    assert parse_assignment(text, 3) == [1, 2, 1]
    with pytest.raises(AssignmentParseError):
        parse_assignment(text, 4)
    with pytest.raises(AssignmentParseError):
        parse_assignment("2 1\n1 2\n", 2)


def test_greedy_small_graphs():
    for seed in range(1, 6):
        assert greedy_lf(complete_graph(3), seed).used == 3
        assert greedy_lf(cycle_graph(5), seed).used == 3
        assert greedy_interchange(complete_graph(3), seed).used == 3


def test_lf_order_is_degree_sorted_and_seeded():
    g = random_graph(30, 0.3, seed=2)
    order = lf_order(g, seed=4)
    degrees = [g.degree(v) for v in order]
    assert sorted(order) == list(range(30))
    assert degrees == sorted(degrees, reverse=True)
    assert lf_order(g, seed=4) == order


def test_interchange_beats_plain_greedy_on_crown():
    print("\n--- 🧪 Testing interchange on the crown graph ---")
    crown = crown_graph(3)
    adversarial = [0, 1, 2, 3, 4, 5]
    plain = greedy_order(crown, adversarial)
    swapped = interchange_order(crown, adversarial)
    assert plain.used == 3, f"Plain greedy should need 3 colors, got {plain.used}"
    assert swapped.used == 2, f"Interchange should reach 2 colors, got {swapped.used}"
    assert verify(crown, swapped) == []
    print("✅ Interchange test passed.")


def test_interchange_never_worse_than_plain():
    for seed in range(20):
        g = random_graph(25, 0.35, seed)
        order = lf_order(g, seed)
        assert interchange_order(g, order).used <= greedy_order(g, order).used


def test_brute_force_chromatic():
    assert brute_force_chromatic(complete_graph(4)) == 4
    assert brute_force_chromatic(cycle_graph(5)) == 3
    assert brute_force_chromatic(petersen_graph()) == 3
    assert brute_force_chromatic(crown_graph(3)) == 2
    with pytest.raises(GraphTooLargeError):
        brute_force_chromatic(Graph(15, []))


def test_every_algorithm_is_proper_and_bounded():
    print("\n--- 🧪 Testing Δ+1 and χ bounds for every algorithm ---")
    fixtures = [complete_graph(4), cycle_graph(5), petersen_graph(), crown_graph(4), star_graph(5)]
    fixtures += [random_graph(12, 0.4, seed) for seed in range(8)]
    for g in fixtures:
        chi = brute_force_chromatic(g) if g.edge_count else 1
        for algorithm in ALGORITHMS:
            for seed in (1, 2, 3):
                result = run_solver(algorithm, g, seed)
                assert verify(g, result.coloring) == []
                assert chi <= result.coloring.used <= max_degree(g) + 1, (
                    f"{algorithm} used {result.coloring.used} colors on {g} (chi={chi})"
                )
    print("✅ Bounds hold.")


def test_solvers_are_deterministic():
    g = random_graph(40, 0.3, seed=11)
    for algorithm in ALGORITHMS:
        first = run_solver(algorithm, g, seed=5)
        second = run_solver(algorithm, g, seed=5)
        assert first.coloring.colors == second.coloring.colors, f"{algorithm} is not deterministic"


def test_unknown_algorithm():
    with pytest.raises(ValueError):
        run_solver("tabu", complete_graph(3), 1)


# --- vertex cover and DGC repair ---

def _conflicts(edges):
    return ConflictSubgraph(
        conflict_edges=list(edges), touched_vertices=sorted({x for e in edges for x in e})
    )


def _is_cover(edges, vertices):
    return all(u in vertices or v in vertices for u, v in edges)


def _brute_min_cover(edges):
    touched = sorted({x for e in edges for x in e})
    for k in range(len(touched) + 1):
        if any(_is_cover(edges, set(s)) for s in combinations(touched, k)):
            return k
    return len(touched)


def _brute_minimal_covers(edges, bound):
    touched = sorted({x for e in edges for x in e})
    found = set()
    for k in range(min(bound, len(touched)) + 1):
        for s in combinations(touched, k):
            s = frozenset(s)
            if _is_cover(edges, s) and all(not _is_cover(edges, s - {v}) for v in s):
                found.add(s)
    return found


def test_min_vertex_cover_examples():
    assert len(min_vertex_cover(_conflicts([(0, 1), (1, 2), (0, 2)]), 3)) == 2
    assert min_vertex_cover(_conflicts([(0, 1), (0, 2), (0, 3), (0, 4)]), 4) == frozenset({0})
    assert min_vertex_cover(_conflicts([(0, 1), (1, 2), (0, 2)]), 1) is None
    assert min_vertex_cover(_conflicts([]), 0) == frozenset()


def test_min_vertex_cover_matches_brute_force():
    print("\n--- 🧪 Testing vertex cover against subset enumeration (200 graphs) ---")
    rng = np.random.default_rng(2024)
    for trial in range(200):
        n = int(rng.integers(2, 13))
        g = random_graph(n, float(rng.uniform(0.15, 0.6)), seed=trial)
        edges = list(g.edges)
        cover = min_vertex_cover(_conflicts(edges), n)
        expected = _brute_min_cover(edges)
        assert cover is not None and _is_cover(edges, cover)
        assert len(cover) == expected, f"trial {trial}: got {len(cover)}, expected {expected}"
    print("✅ 200/200 agree.")


def test_search_budget_stops_the_search():
    budget = SearchBudget(max_nodes=1)
    g = random_graph(12, 0.5, seed=1)
    with pytest.raises(SearchBudgetExceeded):
        list(enumerate_covers(_conflicts(list(g.edges)), 12, budget=budget))


def test_enumerate_covers_examples():
    assert list(enumerate_covers(_conflicts([(3, 7)]), 1)) == [frozenset({3}), frozenset({7})]
    assert list(enumerate_covers(_conflicts([]), 0)) == [frozenset()]
    path = [(0, 1), (1, 2), (2, 3)]
    covers = list(enumerate_covers(_conflicts(path), 2))
    assert len(covers) == len(set(covers))
    assert set(covers) == _brute_minimal_covers(path, 2)
    assert list(enumerate_covers(_conflicts(path), 1)) == []


def test_enumerate_covers_sizes_and_limit():
    g = random_graph(9, 0.4, seed=5)
    edges = list(g.edges)
    covers = list(enumerate_covers(_conflicts(edges), 9, limit=1000))
    assert set(covers) == _brute_minimal_covers(edges, 9)
    sizes = [len(c) for c in covers]
    assert sizes == sorted(sizes), "Smaller covers come first"
    assert len(list(enumerate_covers(_conflicts(edges), 9, limit=3))) == min(3, len(covers))


def _instance(base_edges, added, colors, target_colors, increment_r, n=None):
    n = n or len(colors)
    return DgcInstance(
        base_graph=Graph(n, base_edges),
        target_graph=Graph(n, list(base_edges) + list(added)),
        base_coloring=Coloring.model_construct(colors=list(colors), used=max(colors)),
        edit_k=len(added),
        increment_r=increment_r,
        target_colors=target_colors,
    )


def test_conflict_subgraph_examples():
    print("\n--- 🧪 Testing conflict subgraph ---")
    assert conflict_subgraph(_instance([], [(0, 1)], [1, 2], 2, 2)).conflict_edges == []
    assert conflict_subgraph(_instance([], [(0, 1)], [1, 1], 2, 2)).conflict_edges == [(0, 1)]
    added = [(0, 1), (2, 3), (0, 2), (1, 4), (3, 5)]
    h = conflict_subgraph(_instance([], added, [1, 1, 2, 2, 3, 3], 3, 4))
    assert h.conflict_edges == [(0, 1), (2, 3)]
    assert h.touched_vertices == [0, 1, 2, 3]
    with pytest.raises(ImproperBaseColoringError):
        conflict_subgraph(_instance([(0, 1)], [(1, 2)], [1, 1, 2], 2, 2))
    print("✅ Conflict subgraph passed.")


def test_dgc_instance_validation():
    with pytest.raises(ValidationError):
        _instance([], [(0, 1)], [1, 2], 2, 3)  # increment_r > 2 * edit_k
    with pytest.raises(ValidationError):
        DgcInstance(
            base_graph=Graph(3, [(0, 1)]),
            target_graph=Graph(3, [(1, 2)]),
            base_coloring=_coloring([1, 2, 1]),
            edit_k=0,
            increment_r=0,
            target_colors=2,
        )


def test_dgc_solve_examples():
    identity = _instance([], [(0, 1)], [1, 2, 1], 2, 2)
    assert dgc_solve(identity).colors == [1, 2, 1]

    inst = _instance([(1, 2)], [(0, 1)], [1, 1, 2], 2, 2)
    result = dgc_solve(inst)
    assert result is not None and result.used <= 2
    assert verify(inst.target_graph, result) == []
    assert result.hamming(_coloring([1, 1, 2])) == 1

    k3 = _instance([(0, 1), (1, 2)], [(0, 2)], [1, 2, 1], 2, 2)
    assert dgc_solve(k3) is None, "A triangle cannot be 2-colored"


def _fill(g, colors, free, k):
    """Backtracking over the free vertices; everyone else keeps `colors`."""
    colors = list(colors)
    for v in free:
        colors[v] = 0

    def place(idx):
        if idx == len(free):
            return True
        v = free[idx]
        taken = {colors[w] for w in g.adjacency[v]}
        for color in range(1, k + 1):
            if color not in taken:
                colors[v] = color
                if place(idx + 1):
                    return True
        colors[v] = 0
        return False

    return place(0)


def _any_repair_within(inst):
    """Is there a proper target_colors-coloring of the target within Hamming distance r of the base?"""
    g, base, k, r = inst.target_graph, inst.base_coloring.colors, inst.target_colors, inst.increment_r
    colors = [0] * g.vertex_count

    def place(v, changed):
        if v == g.vertex_count:
            return True
        taken = {colors[w] for w in g.adjacency[v]}
        for color in range(1, k + 1):
            cost = int(color != base[v])
            if color in taken or changed + cost > r:
                continue
            colors[v] = color
            if place(v + 1, changed + cost):
                return True
        colors[v] = 0
        return False

    return place(0, 0)


def _cover_repair_exists(inst):
    """The same question restricted to recoloring a minimal conflict cover plus over-ceiling vertices."""
    h = conflict_subgraph(inst)
    base, k, r = inst.base_coloring.colors, inst.target_colors, inst.increment_r
    forced = {v for v, color in enumerate(base) if color > k}
    if not h.conflict_edges and not forced:
        return True
    bound = min(r - len(forced), len(h.conflict_edges))
    if bound < 0:
        return False
    covers = _brute_minimal_covers(h.conflict_edges, bound) if h.conflict_edges else {frozenset()}
    for cover in covers:
        free = sorted(cover | forced)
        if len(free) <= r and _fill(inst.target_graph, base, free, k):
            return True
    return False


def test_dgc_solve_against_exhaustive_search():
    print("\n--- 🧪 Testing DGC repair on 100 random 10-vertex instances ---")
    rng = np.random.default_rng(99)
    solved = 0
    for trial in range(100):
        base_graph = random_graph(10, 0.3, seed=1000 + trial)
        base = greedy_lf(base_graph, seed=trial)
        missing = [(u, v) for u in range(10) for v in range(u + 1, 10) if not base_graph.has_edge(u, v)]
        k = int(rng.integers(1, 5))
        picks = rng.choice(len(missing), size=k, replace=False)
        added = [missing[i] for i in sorted(picks.tolist())]
        target_colors = max(1, base.used - int(rng.integers(0, 2)))
        inst = _instance(list(base_graph.edges), added, base.colors, target_colors, int(rng.integers(0, 2 * k + 1)))

        labels = repair_labels(inst, cover_limit=100_000, search_nodes=None)
        if labels is not None:
            solved += 1
            result = dgc_solve(inst, cover_limit=100_000)
            assert verify(inst.target_graph, result) == [], f"trial {trial}: improper repair"
            assert max(labels) <= target_colors
            assert sum(1 for a, b in zip(labels, base.colors) if a != b) <= inst.increment_r
            assert _any_repair_within(inst), f"trial {trial}: repair found where none exists"
        assert (labels is not None) == _cover_repair_exists(inst), f"trial {trial}: cover oracle disagrees"
    print(f"✅ Agreement on 100 instances ({solved} repaired).")


def test_dgc_interchange_frees_a_blocked_cover_vertex():
    # path 2-0-1-3 after adding (0, 1): both endpoints see both colors
    inst = _instance([(0, 2), (1, 3)], [(0, 1)], [1, 1, 2, 2], 2, 2)
    assert dgc_solve(inst) is None, "Recoloring the cover alone cannot work"
    result = dgc_solve(inst, interchange=True)
    assert result is not None and result.colors == [2, 1, 1, 2]
    assert verify(inst.target_graph, result) == []
    assert result.hamming(_coloring([1, 1, 2, 2])) == 2

    tight = _instance([(0, 2), (1, 3)], [(0, 1)], [1, 1, 2, 2], 2, 1)
    assert dgc_solve(tight, interchange=True) is None, "Moving 2 vertices exceeds a budget of 1"


def test_dgc_interchange_against_exhaustive_search():
    print("\n--- 🧪 Testing DGC repair with interchanges on 100 random instances ---")
    rng = np.random.default_rng(7)
    gained = 0
    for trial in range(100):
        base_graph = random_graph(10, 0.35, seed=2000 + trial)
        base = greedy_lf(base_graph, seed=trial)
        missing = [(u, v) for u in range(10) for v in range(u + 1, 10) if not base_graph.has_edge(u, v)]
        k = int(rng.integers(1, 5))
        picks = rng.choice(len(missing), size=k, replace=False)
        added = [missing[i] for i in sorted(picks.tolist())]
        target_colors = max(1, base.used - int(rng.integers(0, 2)))
        inst = _instance(list(base_graph.edges), added, base.colors, target_colors, int(rng.integers(0, 2 * k + 1)))

        labels = repair_labels(inst, cover_limit=100_000, interchange=True)
        if labels is not None:
            assert verify(inst.target_graph, Coloring.from_labels(labels)) == [], f"trial {trial}: improper repair"
            assert max(labels) <= target_colors
            assert sum(1 for a, b in zip(labels, base.colors) if a != b) <= inst.increment_r
            assert _any_repair_within(inst), f"trial {trial}: repair found where none exists"
            gained += not _cover_repair_exists(inst)
        else:
            assert not _cover_repair_exists(inst), f"trial {trial}: interchanges lost a cover repair"
    print(f"✅ Sound on 100 instances ({gained} repaired only through interchanges).")


# --- turbo heuristic ---

def test_schedule_examples():
    print("\n--- 🧪 Testing edge schedule ---")
    p4 = path_graph(4)
    order = schedule_edges(p4, seed=1).order
    assert order[0] == 1 and sorted(order[1:]) == [0, 2], "Middle edge of P4 goes first"
    k3 = complete_graph(3)
    assert schedule_edges(k3, 3).order == schedule_edges(k3, 3).order
    star = star_graph(4)
    assert sorted(schedule_edges(star, 2).order) == [0, 1, 2, 3]
    with pytest.raises(ValidationError):
        EdgeSchedule(order=[0, 0], seed=1)
    print("✅ Edge schedule passed.")


def test_add_edge_greedy_examples():
    adjacency = [set(), set()]
    c = _coloring([1, 2])
    c, added = add_edge_greedy(adjacency, c, (0, 1))
    assert not added and c.colors == [1, 2]

    adjacency = [set() for _ in range(3)]
    c = Coloring.uniform(3)
    c, added = add_edge_greedy(adjacency, c, (0, 1))
    assert added and c.colors == [2, 1, 1] and c.used == 2
    c, added = add_edge_greedy(adjacency, c, (1, 2))
    assert not added and c.colors == [2, 1, 2], "v takes the existing color 2"
    c, added = add_edge_greedy(adjacency, c, (0, 2))
    assert added and c.used == 3 and c.colors == [3, 1, 2]

    adjacency = [set() for _ in range(4)]
    c = Coloring.uniform(4)
    for e in complete_graph(4).edges:
        c, _ = add_edge_greedy(adjacency, c, e)
    assert normalize(c.colors).used == 4


def _tracker(events, edges_added, total_edges=100, k_best=5):
    return RegretTracker(color_events=events, edges_added=edges_added, total_edges=total_edges, k_best=k_best)


def test_regret_metric_examples():
    assert regret_metric(_tracker([0, 12, 17], 20), 3) == 8
    assert regret_metric(_tracker([0], 5), 1) == math.inf
    assert regret_metric(_tracker([0, 9], 9), 2) == 9
    assert is_moment_of_regret(_tracker([0, 1], 3, total_edges=100, k_best=20), 2)
    assert not is_moment_of_regret(_tracker([0, 1], 5, total_edges=100, k_best=20), 2)
    assert not is_moment_of_regret(_tracker([0], 3), 1)
    with pytest.raises(ValidationError):
        _tracker([0], 0, k_best=0)


def test_rollback_point_examples():
    print("\n--- 🧪 Testing rollback point ---")
    log = CheckpointLog.start(0, [1, 1])
    # rate 20; gaps 30, 25, 2, 1
    assert rollback_point(_tracker([0, 30, 55, 57, 58], 58), log) == 54
    assert rollback_point(_tracker([0, 30, 60], 60), log) == 59
    assert rollback_point(_tracker([0, 1, 2], 2), log) == 0
    repaired = _tracker([40, 40, 41], 41)
    repaired.repair_point = 40
    assert rollback_point(repaired, log) == 40
    assert rollback_point(_tracker([0, 1, 2], 60), CheckpointLog.start(50, [1, 1])) == 50
    print("✅ Rollback point passed.")


def test_rebase_keeps_earlier_color_events():
    tracker = _tracker([0, 30, 55, 57, 58], 58)
    tracker.rebase(58, 4)
    assert tracker.color_events == [0, 30, 55, 57] and tracker.repair_point == 58
    tracker.edges_added = 70
    tracker.record_color(70)
    # the next color is judged on real history: gaps 30, 25, 2, 13
    assert regret_metric(tracker, 5) == 7.5
    assert rollback_point(tracker, CheckpointLog.start(0, [1, 1])) == 54


def test_checkpoint_log_restores_every_prefix():
    g = random_graph(30, 0.3, seed=4)
    run = TurboRun(g, seed=4, k_best=greedy_lf(g, 4).used, limits=default_limits(enabled=False))
    history = [list(run.coloring.colors)]
    while run.edges_added < g.edge_count:
        run.add_next_edge()
        history.append(list(run.coloring.colors))
    for index, colors in enumerate(history):
        assert run.log.restore(index) == colors, f"restore({index}) differs from the live run"
    with pytest.raises(ValueError):
        CheckpointLog.start(5, [1]).restore(4)


def test_checkpoint_log_survives_accepted_repairs():
    print("\n--- 🧪 Testing checkpoint history across repairs ---")
    accepted = 0
    for seed in (1, 2, 3):
        g = random_graph(50, 0.3, seed)
        run = TurboRun(g, seed, k_best=max(2, greedy_lf(g, seed).used - 2))
        repaired_at = []
        while run.edges_added < g.edge_count:
            if run.add_next_edge():
                before = run.stats.rollbacks_accepted
                run.handle_regret()
                if run.stats.rollbacks_accepted > before:
                    repaired_at.append(run.edges_added)
                    assert run.log.restore(run.edges_added) == run.coloring.colors
        assert run.log.origin == 0
        for index in range(g.edge_count + 1):
            restored = Coloring.model_construct(colors=run.log.restore(index), used=0)
            assert verify(g, restored, edge_subset=run.schedule.order[:index]) == [], (
                f"seed {seed}: restore({index}) is improper on its prefix (repairs at {repaired_at})"
            )
        assert run.log.restore(g.edge_count) == run.coloring.colors
        assert len(run.tracker.color_events) == run.coloring.used
        assert run.tracker.color_events == sorted(set(run.tracker.color_events))
        accepted += len(repaired_at)
    assert accepted > 0, "Expected at least one accepted repair over three seeds"
    print(f"✅ Every prefix restored proper ({accepted} repairs accepted).")


def test_prefix_properness_after_every_edge():
    print("\n--- 🧪 Testing prefix properness with repairs enabled ---")
    for seed in (1, 2, 3):
        g = random_graph(45, 0.3, seed)
        k_best = max(2, greedy_lf(g, seed).used - 2)
        run = TurboRun(g, seed, k_best, limits=default_limits(audit_steps=50))
        while run.edges_added < g.edge_count:
            if run.add_next_edge():
                run.handle_regret()
            prefix = run.schedule.order[: run.edges_added]
            assert verify(g, run.coloring, edge_subset=prefix) == [], f"seed {seed}: improper after {run.edges_added}"
        stats = run.stats
        assert stats.rollbacks_accepted <= stats.rollbacks_attempted <= stats.regret_events
    print("✅ Every prefix stayed proper.")


def test_audited_run_completes():
    g = random_graph(60, 0.25, seed=8)
    coloring, stats = dyn_turbo_color(g, seed=8, limits=default_limits(audit_steps=1000))
    assert verify(g, coloring) == []
    assert stats.final_colors == coloring.used
    assert stats.edge_additions == g.edge_count


def test_dyn_turbo_examples():
    coloring, stats = dyn_turbo_color(Graph(5, []), seed=1)
    assert coloring.used == 1 and stats.regret_events == 0
    for seed in range(1, 6):
        assert dyn_turbo_color(complete_graph(4), seed)[0].used == 4
        assert edge_greedy_color(complete_graph(4), seed)[0].used == 4


def test_edge_greedy_never_repairs():
    g = random_graph(40, 0.4, seed=6)
    _, stats = edge_greedy_color(g, seed=6, k_best=2)
    assert stats.rollbacks_attempted == 0 and stats.rollbacks_accepted == 0


def test_run_stats_ordering():
    with pytest.raises(ValidationError):
        RunStats(regret_events=1, rollbacks_attempted=2)


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-v"]))
