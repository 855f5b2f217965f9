# app/bench.py
"""
Benchmark harness: (instance x algorithm x seed) cells, reference numbers, CSV/JSON reports.
"""
import asyncio
import csv
import io
import json
import os
import time
from concurrent.futures import ProcessPoolExecutor
from functools import lru_cache
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Sequence

from dotenv import load_dotenv
from pydantic import ValidationError

from app.coloring import ColoringInvariantError, SolverTimeout
from app.graph import Graph
from app.models import BenchRecord, BenchSummaryRow, ReferenceValue, RepairLimits
from app.parser import load_dimacs
from app.solvers import ALGORITHMS, run_solver

load_dotenv()

INSTANCES_DIR = os.getenv("COLORING_INSTANCES_DIR")
REFS_FILE = os.getenv(
    "COLORING_REFS_FILE", str(Path(__file__).resolve().parent.parent / "data" / "reference_chi.csv")
)
BENCH_JOBS = int(os.getenv("BENCH_JOBS", 1))
DEFAULT_SEEDS = [1, 2, 3, 4, 5]
REFERENCE_COLUMNS = ["dyn_tc", "greedy", "rcc", "tabu", "search_tree"]


def instance_key(name: str) -> str:
    """`R125.1.col`, `r125.1` and `R125.1` all map to `r125.1`."""
    name = Path(name).name.lower()
    return name[:-4] if name.endswith(".col") else name


def _optional_int(text: str) -> Optional[int]:
    text = (text or "").strip()
    return int(text) if text else None


def load_references(path: Optional[str] = None) -> Dict[str, ReferenceValue]:
    """
    Reads the reference table. The chi column follows the published convention: a
    parenthesized value is the best known, not a proven chromatic number.
    """
    path = Path(path or REFS_FILE)
    refs: Dict[str, ReferenceValue] = {}
    with path.open("r", encoding="utf-8", newline="") as handle:
        for row in csv.DictReader(handle):
            chi_text = (row.get("chi") or "").strip()
            value = ReferenceValue(
                instance=row["instance"].strip(),
                chi=_optional_int(chi_text.strip("()")),
                exact=bool(chi_text) and not chi_text.startswith("("),
                **{column: _optional_int(row.get(column, "")) for column in REFERENCE_COLUMNS},
            )
            refs[instance_key(value.instance)] = value
    return refs


def discover_instances(directory: Optional[str] = None) -> List[Path]:
    directory = directory or INSTANCES_DIR
    if not directory:
        raise ValueError("No instance directory given and COLORING_INSTANCES_DIR is not set.")
    root = Path(directory)
    if not root.is_dir():
        raise ValueError(f"Instance directory {root} does not exist.")
    paths = sorted(p for p in root.iterdir() if p.suffix.lower() == ".col")
    if not paths:
        raise ValueError(f"Instance directory {root} contains no .col files.")
    return paths


@lru_cache(maxsize=8)
def _cached_graph(path: str) -> Graph:
    return load_dimacs(path)


def run_cell(
    path: str,
    algorithm: str,
    seed: int,
    k_best: Optional[int] = None,
    time_limit_s: Optional[float] = None,
    limits: Optional[RepairLimits] = None,
    reference: Optional[ReferenceValue] = None,
) -> BenchRecord:
    """One isolated cell. Failures become rows; nothing escapes."""
    name = Path(path).name
    row = {
        "instance": name[:-4] if name.lower().endswith(".col") else name,
        "n": 0,
        "m": 0,
        "algorithm": algorithm,
        "seed": seed,
        "reference_chi": reference.chi if reference else None,
        "reference_exact": reference.exact if reference else False,
    }
    try:
        g = _cached_graph(str(path))
        row.update(n=g.vertex_count, m=g.edge_count)
        result = run_solver(algorithm, g, seed, k_best=k_best, time_limit_s=time_limit_s, limits=limits)
        stats = result.stats
        row.update(
            colors=result.coloring.used,
            time_ms=result.time_ms,
            regret_events=stats.regret_events if stats else 0,
            rollbacks_accepted=stats.rollbacks_accepted if stats else 0,
        )
        return BenchRecord(**row)
    except SolverTimeout:
        return BenchRecord(**row, status="timeout")
    except ColoringInvariantError as e:
        return BenchRecord(**row, status="error", error=f"invariant: {e}")
    except ValidationError as e:
        # colors below a proven chi
        return BenchRecord(**row, status="error", error=f"reference: {e.errors()[0]['msg']}")
    except Exception as e:
        return BenchRecord(**row, status="error", error=str(e))


async def run_bench_async(
    paths: Sequence[Path],
    algorithms: Sequence[str],
    seeds: Sequence[int],
    k_best: Optional[int] = None,
    time_limit_s: Optional[float] = None,
    limits: Optional[RepairLimits] = None,
    refs: Optional[Dict[str, ReferenceValue]] = None,
    jobs: int = BENCH_JOBS,
) -> List[BenchRecord]:
    """
    Runs every cell, one instance batch at a time. With jobs > 1 the cells of a batch run
    in a process pool; records are sorted before they are returned.
    """
    for algorithm in algorithms:
        if algorithm not in ALGORITHMS:
            raise ValueError(f"Unknown algorithm {algorithm!r}")
    refs = refs or {}
    loop = asyncio.get_running_loop()
    executor = ProcessPoolExecutor(max_workers=jobs) if jobs > 1 else None
    records: List[BenchRecord] = []

    try:
        for batch_num, path in enumerate(paths, start=1):
            reference = refs.get(instance_key(path.name))
            cells = [(algorithm, seed) for algorithm in algorithms for seed in seeds]
            print(f"🔄 [{batch_num}/{len(paths)}] {path.name}: {len(cells)} cells")
            batch_start = time.time()

            if executor is None:
                batch = []
                for algorithm, seed in cells:
                    batch.append(
                        await loop.run_in_executor(
                            None, run_cell, str(path), algorithm, seed, k_best, time_limit_s, limits, reference
                        )
                    )
            else:
                batch = await asyncio.gather(*[
                    loop.run_in_executor(
                        executor, run_cell, str(path), algorithm, seed, k_best, time_limit_s, limits, reference
                    )
                    for algorithm, seed in cells
                ])

            failed = sum(1 for r in batch if r.status != "ok")
            print(f"⏱️ {path.name} done in {time.time() - batch_start:.1f}s"
                  + (f" ⚠️ {failed} cell(s) not ok" if failed else ""))
            records.extend(batch)
    finally:
        if executor is not None:
            executor.shutdown()

    return sorted(records, key=lambda r: (r.instance, r.algorithm, r.seed))


def run_bench(paths: Sequence[Path], algorithms: Sequence[str], seeds: Sequence[int], **kwargs) -> List[BenchRecord]:
    return asyncio.run(run_bench_async(paths, algorithms, seeds, **kwargs))


def summarize(
    records: Iterable[BenchRecord], refs: Optional[Dict[str, ReferenceValue]] = None
) -> List[BenchSummaryRow]:
    """Best-of-seeds per algorithm, one row per instance, beside the published numbers."""
    refs = refs or {}
    rows: Dict[str, BenchSummaryRow] = {}
    for record in records:
        row = rows.setdefault(
            record.instance,
            BenchSummaryRow(
                instance=record.instance,
                n=record.n,
                m=record.m,
                best={},
                reference=refs.get(instance_key(record.instance)),
            ),
        )
        row.n, row.m = max(row.n, record.n), max(row.m, record.m)
        current = row.best.get(record.algorithm)
        if record.status == "ok" and record.colors is not None:
            row.best[record.algorithm] = record.colors if current is None else min(current, record.colors)
        else:
            row.best.setdefault(record.algorithm, None)
    return [rows[name] for name in sorted(rows)]


def _csv_value(value):
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    return value


def records_to_csv(records: Iterable[BenchRecord], timings: bool = False) -> str:
    """CSV in BenchRecord field order.

    time_ms is left blank unless timings are requested, so the same sweep writes the same bytes;
    the JSON report always carries it.
    """
    columns = list(BenchRecord.model_fields)
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(columns)
    for record in records:
        data = record.model_dump()
        if not timings:
            data["time_ms"] = None
        writer.writerow([_csv_value(data[column]) for column in columns])
    return out.getvalue()


def report_json(records: Sequence[BenchRecord], summary: Sequence[BenchSummaryRow]) -> str:
    return json.dumps(
        {
            "records": [r.model_dump() for r in records],
            "summary": [s.model_dump() for s in summary],
        },
        indent=2,
    )


def format_summary(summary: Sequence[BenchSummaryRow], algorithms: Sequence[str]) -> str:
    """Plain-text table shaped like the published comparison tables."""
    header = ["Graph", "chi"] + list(algorithms) + ["ref DYN-TC", "ref Greedy", "ref RCC", "ref TABU"]
    lines = [header]
    for row in summary:
        ref = row.reference
        cells = [row.instance, ref.chi_label() if ref else "?"]
        cells += ["-" if row.best.get(a) is None else str(row.best[a]) for a in algorithms]
        for column in ("dyn_tc", "greedy", "rcc", "tabu"):
            value = getattr(ref, column) if ref else None
            cells.append("-" if value is None else str(value))
        lines.append(cells)
    widths = [max(len(line[i]) for line in lines) for i in range(len(header))]
    return "\n".join("  ".join(cell.ljust(w) for cell, w in zip(line, widths)).rstrip() for line in lines)
