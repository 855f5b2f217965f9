# main_test_pipeline.py
import csv
import json
import os
import shutil
import sys
from pathlib import Path

import pytest
from dotenv import load_dotenv
from fastapi.testclient import TestClient
from pydantic import ValidationError

import cli
from app import bench
from app.graph import random_graph
from app.models import BenchRecord, ReferenceValue
from app.parser import load_dimacs, parse_dimacs_with_report
from app.solvers import ALGORITHMS, run_solver
from main import app

load_dotenv()

# --- CONFIGURATION ---
DATA_DIR = Path(__file__).resolve().parent / "data"
FIXTURES = DATA_DIR / "instances"
INSTANCES_DIR = os.getenv("COLORING_INSTANCES_DIR")
SEEDS = [1, 2, 3, 4, 5]
K3_TEXT = "p edge 3 3\ne 1 2\ne 2 3\ne 1 3\n"


def _instance_file(name):
    """Finds a benchmark file by instance name (`R125.1` matches `r125.1.col`)."""
    if not INSTANCES_DIR or not Path(INSTANCES_DIR).is_dir():
        return None
    for path in Path(INSTANCES_DIR).glob("*.col"):
        if bench.instance_key(path.name) == bench.instance_key(name):
            return path
    return None


def _needs(name):
    return pytest.mark.skipif(_instance_file(name) is None, reason=f"{name} not found in COLORING_INSTANCES_DIR")


def _best_of_seeds(path, algorithm):
    g = load_dimacs(path)
    results = [run_solver(algorithm, g, seed) for seed in SEEDS]
    return min(r.coloring.used for r in results), max(r.time_ms for r in results)


# --- color / verify / generate ---

def test_color_k3(capsys):
    print("\n--- 🧪 Testing `color` ---")
    code = cli.main(["color", "--input", str(FIXTURES / "k3.col"), "--algo", "greedy-lf", "--seed", "1"])
    out = capsys.readouterr().out
    assert code == 0
    assert out.startswith("colors=3 time_ms="), f"Unexpected output: {out!r}"


def test_color_missing_file(tmp_path, capsys):
    code = cli.main(["color", "--input", str(tmp_path / "missing.col")])
    assert code == 1
    assert "❌" in capsys.readouterr().err


def test_usage_errors_exit_1():
    with pytest.raises(SystemExit) as err:
        cli.main(["color", "--input", "x.col", "--algo", "tabu"])
    assert err.value.code == 1


def test_color_writes_a_verifiable_assignment(tmp_path, capsys):
    out_file = tmp_path / "petersen.sol"
    for algorithm in ALGORITHMS:
        code = cli.main([
            "color", "--input", str(FIXTURES / "petersen.col"), "--algo", algorithm, "--out", str(out_file),
        ])
        assert code == 0
        capsys.readouterr()
        assert cli.main(["verify", "--input", str(FIXTURES / "petersen.col"), "--assignment", str(out_file)]) == 0
        assert capsys.readouterr().out.startswith("OK colors=")


def test_color_output_is_deterministic(tmp_path):
    first, second = tmp_path / "a.sol", tmp_path / "b.sol"
    for target in (first, second):
        cli.main(["color", "--input", str(FIXTURES / "crown.col"), "--algo", "dyn-tc", "--seed", "7",
                  "--out", str(target)])
    assert first.read_bytes() == second.read_bytes()


def test_verify_reports_conflicts(tmp_path, capsys):
    assignment = tmp_path / "k3.sol"
    assignment.write_text("1 1\n2 1\n3 2\n")
    code = cli.main(["verify", "--input", str(FIXTURES / "k3.col"), "--assignment", str(assignment)])
    out = capsys.readouterr().out
    assert code == 3
    assert "1-2" in out

    assignment.write_text("1 1\n2 2\n3 3\n")
    assert cli.main(["verify", "--input", str(FIXTURES / "k3.col"), "--assignment", str(assignment)]) == 0
    assert "OK colors=3" in capsys.readouterr().out


def test_verify_rejects_short_assignment(tmp_path):
    assignment = tmp_path / "short.sol"
    assignment.write_text("1 1\n2 2\n")
    assert cli.main(["verify", "--input", str(FIXTURES / "k3.col"), "--assignment", str(assignment)]) == 1


def test_verify_rejects_undecodable_assignment(tmp_path, capsys):
    assignment = tmp_path / "binary.sol"
    assignment.write_bytes(b"1 1\n2 \xff\n3 3\n")
    code = cli.main(["verify", "--input", str(FIXTURES / "k3.col"), "--assignment", str(assignment)])
    assert code == 1
    assert "line 2" in capsys.readouterr().err


def test_generate_is_seeded(tmp_path):
    first, second = tmp_path / "a.col", tmp_path / "b.col"
    assert cli.main(["generate", "--n", "30", "--p", "0.2", "--seed", "3", "--out", str(first)]) == 0
    assert cli.main(["generate", "--n", "30", "--p", "0.2", "--seed", "3", "--out", str(second)]) == 0
    assert first.read_text() == second.read_text()
    assert load_dimacs(first).vertex_count == 30
    assert cli.main(["generate", "--n", "30", "--p", "1.5"]) == 1


# --- bench ---

@pytest.fixture
def instance_dir(tmp_path):
    target = tmp_path / "instances"
    target.mkdir()
    for name in ("k3.col", "petersen.col"):
        shutil.copy(FIXTURES / name, target / name)
    return target


def test_bench_sweep_and_csv(instance_dir, tmp_path):
    print("\n--- 🧪 Testing `bench` ---")
    csv_a, csv_b, report = tmp_path / "a.csv", tmp_path / "b.csv", tmp_path / "report.json"
    args = ["bench", "--instances", str(instance_dir), "--algo", "greedy-lf", "dyn-tc", "--seeds", "1", "2", "3"]
    assert cli.main(args + ["--csv", str(csv_a), "--json", str(report)]) == 0
    assert cli.main(args + ["--csv", str(csv_b)]) == 0

    lines = csv_a.read_text().splitlines()
    assert lines[0] == ",".join(BenchRecord.model_fields), "CSV columns follow the record fields"
    assert len(lines) == 1 + 2 * 2 * 3, f"Expected 12 records, got {len(lines) - 1}"
    assert csv_a.read_bytes() == csv_b.read_bytes(), "Repeated sweeps must produce identical CSV"

    time_column = lines[0].split(",").index("time_ms")
    assert all(line.split(",")[time_column] == "" for line in lines[1:])

    data = json.loads(report.read_text())
    assert len(data["records"]) == 12
    assert [row["instance"] for row in data["summary"]] == ["k3", "petersen"]
    print("✅ Bench sweep passed.")


def test_bench_timings_flag(instance_dir, tmp_path):
    out = tmp_path / "timed.csv"
    cli.main(["bench", "--instances", str(instance_dir), "--algo", "greedy-lf", "--seeds", "1",
              "--csv", str(out), "--timings"])
    lines = out.read_text().splitlines()
    time_column = lines[0].split(",").index("time_ms")
    assert all(line.split(",")[time_column] != "" for line in lines[1:])


def test_bench_needs_instances(tmp_path):
    empty = tmp_path / "empty"
    empty.mkdir()
    assert cli.main(["bench", "--instances", str(empty)]) == 1


def test_cells_record_timeouts_and_errors(tmp_path):
    for algorithm in ("greedy-lf", "dyn-tc"):
        record = bench.run_cell(str(FIXTURES / "petersen.col"), algorithm, 1, time_limit_s=-1.0)
        assert record.status == "timeout" and record.colors is None

    broken = tmp_path / "broken.col"
    broken.write_text("garbage\n")
    record = bench.run_cell(str(broken), "greedy-lf", 1)
    assert record.status == "error" and record.colors is None and record.error


def test_cell_below_proven_chi_becomes_an_error_row():
    wrong = ReferenceValue(instance="k3", chi=4, exact=True)
    record = bench.run_cell(str(FIXTURES / "k3.col"), "greedy-lf", 1, reference=wrong)
    assert record.status == "error" and record.colors == 3
    assert "proven chromatic number 4" in record.error


def test_bench_sweep_survives_a_wrong_reference(instance_dir, tmp_path, capsys):
    refs, out = tmp_path / "refs.csv", tmp_path / "out.csv"
    refs.write_text("instance,chi\nk3,4\npetersen,3\n")
    code = cli.main(["bench", "--instances", str(instance_dir), "--algo", "greedy-lf", "--seeds", "1", "2",
                     "--refs", str(refs), "--csv", str(out)])
    assert code == 0
    rows = list(csv.DictReader(out.read_text().splitlines()))
    assert [(r["instance"], r["status"]) for r in rows] == [
        ("k3", "error"), ("k3", "error"), ("petersen", "ok"), ("petersen", "ok"),
    ]
    assert "2 of 4 cells did not finish ok" in capsys.readouterr().out


def test_parallel_cells_match_sequential():
    paths = [FIXTURES / "crown.col", FIXTURES / "petersen.col"]
    strip = lambda records: [r.model_dump(exclude={"time_ms"}) for r in records]
    sequential = bench.run_bench(paths, ["greedy-lf", "edge-greedy"], [1, 2], jobs=1)
    parallel = bench.run_bench(paths, ["greedy-lf", "edge-greedy"], [1, 2], jobs=2)
    assert strip(sequential) == strip(parallel)


def test_reference_table():
    refs = bench.load_references(DATA_DIR / "reference_chi.csv")
    r250 = refs[bench.instance_key("R250.1.col")]
    assert (r250.chi, r250.exact, r250.dyn_tc, r250.greedy) == (8, True, 8, 9)
    dsjc = refs["dsjc125.5"]
    assert dsjc.chi == 17 and not dsjc.exact and dsjc.chi_label() == "(17)"
    queen = refs["queen12_12"]
    assert queen.chi is None and queen.dyn_tc == 14


def test_record_rejects_colors_below_proven_chi():
    fields = dict(instance="R125.1", n=125, m=209, algorithm="dyn-tc", seed=1, colors=4, reference_chi=5)
    with pytest.raises(ValidationError):
        BenchRecord(**fields, reference_exact=True)
    assert BenchRecord(**fields, reference_exact=False).colors == 4


def test_summary_takes_best_of_seeds():
    refs = bench.load_references(DATA_DIR / "reference_chi.csv")
    row = dict(instance="R250.1", n=250, m=867)
    records = [
        BenchRecord(**row, algorithm="greedy-lf", seed=1, colors=10),
        BenchRecord(**row, algorithm="greedy-lf", seed=2, colors=9),
        BenchRecord(**row, algorithm="greedy-lf", seed=3, status="error", error="boom"),
        BenchRecord(**row, algorithm="dyn-tc", seed=1, status="timeout"),
    ]
    (summary,) = bench.summarize(records, refs)
    assert summary.best == {"greedy-lf": 9, "dyn-tc": None}
    table = bench.format_summary([summary], ["greedy-lf", "dyn-tc"])
    assert "R250.1" in table and table.splitlines()[1].split()[1] == "8"


# --- coloring service ---

client = TestClient(app)


def test_api_lists_algorithms():
    response = client.get("/algorithms")
    assert response.status_code == 200
    assert response.json() == list(ALGORITHMS)


def test_api_colors_upload():
    print("\n--- 🧪 Testing the /color endpoint ---")
    files = {"col_file": ("k3.col", K3_TEXT, "text/plain")}
    response = client.post("/color", files=files, data={"algo": "greedy-lf", "seed": "1"})
    assert response.status_code == 200, response.text
    body = response.json()
    assert body["colors"] == 3 and sorted(body["assignment"]) == [1, 2, 3]
    assert body["stats"] is None

    petersen = (FIXTURES / "petersen.col").read_text()
    response = client.post("/color", files={"col_file": ("petersen.col", petersen, "text/plain")},
                           data={"algo": "dyn-tc", "seed": "2"})
    assert response.status_code == 200, response.text
    assert response.json()["colors"] >= 3 and response.json()["stats"] is not None
    print("✅ /color passed.")


def test_api_rejects_bad_input():
    bad = {"col_file": ("bad.col", "p edge 2 1\ne 1 3\n", "text/plain")}
    assert client.post("/color", files=bad, data={"algo": "greedy-lf"}).status_code == 400
    good = {"col_file": ("k3.col", K3_TEXT, "text/plain")}
    assert client.post("/color", files=good, data={"algo": "tabu"}).status_code == 400


def test_api_verify():
    files = {
        "col_file": ("k3.col", K3_TEXT, "text/plain"),
        "assignment_file": ("k3.sol", "1 1\n2 1\n3 2\n", "text/plain"),
    }
    body = client.post("/verify", files=files).json()
    assert body == {"ok": False, "colors": 2, "conflicts": [[1, 2]]}


# --- published instances (skipped unless COLORING_INSTANCES_DIR holds them) ---

@_needs("DSJC125.5")
def test_parse_dsjc125_5():
    with _instance_file("DSJC125.5").open() as handle:
        g, report = parse_dimacs_with_report(handle)
    assert g.vertex_count == 125
    assert g.edge_count == report.distinct_edges > 0


@_needs("R125.1")
def test_r125_1_matches_chi():
    best, slowest = _best_of_seeds(_instance_file("R125.1"), "dyn-tc")
    assert best == 5 and slowest < 5000
    assert _best_of_seeds(_instance_file("R125.1"), "greedy-lf")[0] == 5


@_needs("R250.1")
def test_r250_1():
    best, slowest = _best_of_seeds(_instance_file("R250.1"), "dyn-tc")
    assert best <= 8 and slowest < 10000
    assert _best_of_seeds(_instance_file("R250.1"), "greedy-lf")[0] <= 9


@_needs("miles250")
def test_miles250():
    best, slowest = _best_of_seeds(_instance_file("miles250"), "dyn-tc")
    assert best == 8 and slowest < 10000


@_needs("DSJC125.5")
def test_dsjc125_5_turbo_beats_greedy():
    greedy, _ = _best_of_seeds(_instance_file("DSJC125.5"), "greedy-lf")
    turbo, slowest = _best_of_seeds(_instance_file("DSJC125.5"), "dyn-tc")
    assert 24 <= greedy <= 28, f"greedy-lf best {greedy}"
    assert turbo <= 22 and turbo < greedy, f"dyn-tc best {turbo} vs greedy {greedy}"
    assert slowest < 60000


# --- repair benefit on generated stand-ins ---

def _colors_per_seed(g, algorithm):
    return [run_solver(algorithm, g, seed).coloring.used for seed in SEEDS]


def _turbo_runs(g):
    results = [run_solver("dyn-tc", g, seed) for seed in SEEDS]
    return [r.coloring.used for r in results], [r.stats.rollbacks_accepted for r in results]


@pytest.mark.parametrize("p", [0.1, 0.5])
def test_repair_beats_edge_greedy_on_random_graphs(p):
    print(f"\n--- 🧪 Testing dyn-tc against edge-greedy on G(125, {p}) ---")
    g = random_graph(125, p, seed=42)
    turbo, accepted = _turbo_runs(g)
    plain = _colors_per_seed(g, "edge-greedy")
    assert min(turbo) <= min(plain), f"dyn-tc {turbo} vs edge-greedy {plain}"
    assert sum(turbo) < sum(plain), f"dyn-tc {turbo} should save colors over edge-greedy {plain}"
    assert sum(accepted) > 0, "No repair was accepted"
    print(f"✅ dyn-tc {turbo} vs edge-greedy {plain}, repairs accepted {accepted}")


def test_repair_not_worse_over_random_stand_ins():
    """Best-of-5 dyn-tc never loses more than one color to the repair-disabled loop, and ties or wins on 90%."""
    shapes = [(n, p) for n in (50, 75, 100) for p in (0.1, 0.3, 0.5)] + [(125, 0.2)]
    not_worse = 0
    for index, (n, p) in enumerate(shapes):
        g = random_graph(n, p, seed=100 + index)
        turbo, plain = min(_colors_per_seed(g, "dyn-tc")), min(_colors_per_seed(g, "edge-greedy"))
        assert turbo <= plain + 1, f"G({n}, {p}): dyn-tc {turbo} vs edge-greedy {plain}"
        not_worse += turbo <= plain
    assert not_worse >= 0.9 * len(shapes), f"dyn-tc tied or won on {not_worse} of {len(shapes)}"


@pytest.mark.skipif(not INSTANCES_DIR or not Path(INSTANCES_DIR).is_dir(), reason="COLORING_INSTANCES_DIR not set")
def test_repair_helps_on_small_instances():
    """dyn-tc best-of-5 vs the repair-disabled loop over every instance with at most 500 vertices."""
    paths = [p for p in sorted(Path(INSTANCES_DIR).glob("*.col")) if load_dimacs(p).vertex_count <= 500]
    if not paths:
        pytest.skip("no instance with at most 500 vertices")
    not_worse = 0
    for path in paths:
        turbo, _ = _best_of_seeds(path, "dyn-tc")
        plain, _ = _best_of_seeds(path, "edge-greedy")
        assert turbo <= plain + 1, f"{path.name}: dyn-tc {turbo} vs edge-greedy {plain}"
        not_worse += turbo <= plain
    assert not_worse >= 0.9 * len(paths)


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-v"]))
