# cli.py
"""
Command-line front end: color, bench, verify and generate.

Exit codes: 0 ok, 1 input could not be parsed, 2 a solver produced an improper coloring,
3 verify found conflicts, 4 the time limit was reached.
"""
import argparse
import sys
from pathlib import Path
from typing import List, Optional

from app import bench
from app.coloring import ColoringInvariantError, ColoringSizeError, SolverTimeout, normalize, verify, write_assignment
from app.graph import random_graph, write_dimacs
from app.parser import AssignmentParseError, DimacsParseError, load_assignment, load_dimacs
from app.solvers import ALGORITHMS, run_solver
from app.turbo import default_limits

EXIT_OK = 0
EXIT_PARSE = 1
EXIT_INVARIANT = 2
EXIT_CONFLICTS = 3
EXIT_TIMEOUT = 4
MAX_LISTED_CONFLICTS = 10


class CliParser(argparse.ArgumentParser):
    """Usage errors are input errors: exit 1, not argparse's default 2."""

    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"❌ {message}", file=sys.stderr)
        raise SystemExit(EXIT_PARSE)


def _fail(message: str, code: int) -> int:
    print(f"❌ {message}", file=sys.stderr)
    return code


def run_color(args) -> int:
    try:
        g = load_dimacs(args.input)
    except DimacsParseError as e:
        return _fail(f"{args.input}: {e}", EXIT_PARSE)

    try:
        result = run_solver(
            args.algo,
            g,
            args.seed,
            k_best=args.k_best,
            time_limit_s=args.time_limit_s,
            limits=default_limits(),
            verbose=args.verbose,
        )
    except ColoringInvariantError as e:
        return _fail(f"internal verification failed: {e}", EXIT_INVARIANT)
    except SolverTimeout:
        return _fail(f"time limit of {args.time_limit_s}s reached", EXIT_TIMEOUT)

    if args.out:
        Path(args.out).write_text(write_assignment(result.coloring), encoding="utf-8")
        if args.verbose:
            print(f"✅ Assignment written to {args.out}", file=sys.stderr)
    print(f"colors={result.coloring.used} time_ms={result.time_ms}")
    return EXIT_OK


def run_bench(args) -> int:
    try:
        paths = bench.discover_instances(args.instances)
    except ValueError as e:
        return _fail(str(e), EXIT_PARSE)

    refs = {}
    refs_file = args.refs or bench.REFS_FILE
    if Path(refs_file).exists():
        try:
            refs = bench.load_references(refs_file)
        except (OSError, KeyError, ValueError) as e:
            return _fail(f"reference table {refs_file}: {e}", EXIT_PARSE)
    elif args.refs:
        return _fail(f"reference table {args.refs} not found", EXIT_PARSE)

    print(f"🔄 {len(paths)} instance(s) x {len(args.algo)} algorithm(s) x {len(args.seeds)} seed(s)")
    records = bench.run_bench(
        paths,
        args.algo,
        args.seeds,
        k_best=args.k_best,
        time_limit_s=args.time_limit_s,
        limits=default_limits(),
        refs=refs,
        jobs=args.jobs,
    )
    summary = bench.summarize(records, refs)

    if args.csv:
        Path(args.csv).write_text(bench.records_to_csv(records, timings=args.timings), encoding="utf-8")
        print(f"✅ CSV written to {args.csv}")
    if args.json:
        Path(args.json).write_text(bench.report_json(records, summary), encoding="utf-8")
        print(f"✅ JSON written to {args.json}")

    print("📊 Best of seeds")
    print(bench.format_summary(summary, args.algo))
    failed = [r for r in records if r.status != "ok"]
    if failed:
        print(f"⚠️ {len(failed)} of {len(records)} cells did not finish ok")
    return EXIT_OK


def run_verify(args) -> int:
    try:
        g = load_dimacs(args.input)
        labels = load_assignment(args.assignment, g.vertex_count)
    except (DimacsParseError, AssignmentParseError) as e:
        return _fail(str(e), EXIT_PARSE)

    coloring = normalize(labels)
    try:
        conflicts = verify(g, coloring)
    except ColoringSizeError as e:
        return _fail(str(e), EXIT_PARSE)

    if not conflicts:
        print(f"OK colors={coloring.used}")
        return EXIT_OK

    print(f"CONFLICTS {len(conflicts)}")
    for u, v in conflicts[:MAX_LISTED_CONFLICTS]:
        print(f"  {u + 1}-{v + 1}")
    if len(conflicts) > MAX_LISTED_CONFLICTS:
        print(f"  ... {len(conflicts) - MAX_LISTED_CONFLICTS} more")
    return EXIT_CONFLICTS


def run_generate(args) -> int:
    if not 0.0 <= args.p <= 1.0 or args.n < 1:
        return _fail(f"need n >= 1 and 0 <= p <= 1, got n={args.n} p={args.p}", EXIT_PARSE)
    g = random_graph(args.n, args.p, args.seed)
    text = write_dimacs(g, comment=f"random graph n={args.n} p={args.p} seed={args.seed}")
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
        print(f"✅ {g.vertex_count} vertices, {g.edge_count} edges written to {args.out}")
    else:
        sys.stdout.write(text)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = CliParser(prog="cli.py", description="Turbo-charged greedy graph coloring")
    sub = parser.add_subparsers(dest="command", required=True)
    algorithms = list(ALGORITHMS)

    color = sub.add_parser("color", help="Color one DIMACS instance")
    color.add_argument("--input", required=True, help="DIMACS .col file")
    color.add_argument("--algo", choices=algorithms, default="dyn-tc")
    color.add_argument("--seed", type=int, default=1)
    color.add_argument("--k-best", type=int, default=None, help="Color budget for the regret rate")
    color.add_argument("--time-limit-s", type=float, default=None)
    color.add_argument("--out", default=None, help="Write the assignment file here")
    color.add_argument("--verbose", action="store_true")
    color.set_defaults(handler=run_color)

    sweep = sub.add_parser("bench", help="Run algorithms x seeds over an instance directory")
    sweep.add_argument("--instances", default=None, help="Directory of .col files (default: $COLORING_INSTANCES_DIR)")
    sweep.add_argument("--algo", nargs="+", choices=algorithms, default=algorithms)
    sweep.add_argument("--seeds", nargs="+", type=int, default=bench.DEFAULT_SEEDS)
    sweep.add_argument("--k-best", type=int, default=None)
    sweep.add_argument("--time-limit-s", type=float, default=None, help="Per-cell limit")
    sweep.add_argument("--csv", default=None)
    sweep.add_argument("--json", default=None)
    sweep.add_argument("--refs", default=None, help="Reference table (default: $COLORING_REFS_FILE)")
    sweep.add_argument("--jobs", type=int, default=bench.BENCH_JOBS)
    sweep.add_argument("--timings", action="store_true", help="Fill time_ms in the CSV")
    sweep.set_defaults(handler=run_bench)

    check = sub.add_parser("verify", help="Check an assignment file against a graph")
    check.add_argument("--input", required=True)
    check.add_argument("--assignment", required=True)
    check.set_defaults(handler=run_verify)

    gen = sub.add_parser("generate", help="Write a seeded G(n, p) instance")
    gen.add_argument("--n", type=int, required=True)
    gen.add_argument("--p", type=float, required=True)
    gen.add_argument("--seed", type=int, default=1)
    gen.add_argument("--out", default=None)
    gen.set_defaults(handler=run_generate)

    return parser


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    return args.handler(args)


if __name__ == "__main__":
    sys.exit(main())
