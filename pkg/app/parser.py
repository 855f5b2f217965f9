"""
DIMACS .col and assignment-file readers.
"""
import sys
from pathlib import Path
from typing import Iterable, List, Optional, TextIO, Tuple, Union

from pydantic import BaseModel

from app.graph import Graph


class DimacsParseError(ValueError):
    def __init__(self, message: str, line_number: int):
        super().__init__(f"line {line_number}: {message}")
        self.line_number = line_number


class MissingProblemLineError(DimacsParseError):
    pass


class DuplicateProblemLineError(DimacsParseError):
    pass


class EndpointOutOfRangeError(DimacsParseError):
    pass


class SelfLoopError(DimacsParseError):
    pass


class MalformedLineError(DimacsParseError):
    pass


class AssignmentParseError(ValueError):
    pass


class ParseReport(BaseModel):
    vertex_count: int = 0
    declared_edges: int = 0
    distinct_edges: int = 0
    duplicate_edges: int = 0
    ignored_lines: int = 0


def _lines(source: Union[str, TextIO, Iterable[str]]) -> Iterable[str]:
    if isinstance(source, str):
        return source.splitlines()
    return source


def _int_token(token: str, line_number: int) -> int:
    try:
        return int(token)
    except ValueError:
        raise MalformedLineError(f"expected an integer, got {token!r}", line_number) from None


def parse_dimacs_with_report(source: Union[str, TextIO, Iterable[str]]) -> Tuple[Graph, ParseReport]:
    """
    Parses a DIMACS .col stream. Duplicate and reversed-duplicate `e` lines are merged
    (first occurrence keeps its position); a declared edge count that disagrees with the
    distinct count only produces a warning.
    """
    n: Optional[int] = None
    report = ParseReport()
    edges: List[Tuple[int, int]] = []
    seen = set()

    for line_number, raw in enumerate(_lines(source), start=1):
        line = raw.strip()
        if not line or line[0] == "c":
            continue
        tokens = line.split()
        kind = tokens[0]

        if kind == "p":
            if n is not None:
                raise DuplicateProblemLineError("second `p` line", line_number)
            if len(tokens) != 4 or tokens[1] not in ("edge", "edges", "col"):
                raise MalformedLineError(f"expected `p edge <n> <m>`, got {line!r}", line_number)
            n = _int_token(tokens[2], line_number)
            declared = _int_token(tokens[3], line_number)
            if n < 1 or declared < 0:
                raise MalformedLineError(f"invalid sizes n={n}, m={declared}", line_number)
            report.vertex_count = n
            report.declared_edges = declared

        elif kind == "e":
            if n is None:
                raise MissingProblemLineError("`e` line before the `p` line", line_number)
            if len(tokens) != 3:
                raise MalformedLineError(f"expected `e <u> <v>`, got {line!r}", line_number)
            u = _int_token(tokens[1], line_number)
            v = _int_token(tokens[2], line_number)
            for endpoint in (u, v):
                if not 1 <= endpoint <= n:
                    raise EndpointOutOfRangeError(f"endpoint {endpoint} out of range [1, {n}]", line_number)
            if u == v:
                raise SelfLoopError(f"self-loop on vertex {u}", line_number)
            edge = (u - 1, v - 1) if u < v else (v - 1, u - 1)
            if edge in seen:
                report.duplicate_edges += 1
                continue
            seen.add(edge)
            edges.append(edge)

        else:
            report.ignored_lines += 1

    if n is None:
        raise MissingProblemLineError("no `p edge <n> <m>` line found", 0)

    report.distinct_edges = len(edges)
    if report.duplicate_edges:
        print(f"⚠️ Merged {report.duplicate_edges} duplicate edge line(s)", file=sys.stderr)
    if report.declared_edges != report.distinct_edges:
        print(
            f"⚠️ Header declares {report.declared_edges} edges, found {report.distinct_edges} distinct",
            file=sys.stderr,
        )
    return Graph(n, edges), report


def parse_dimacs(source: Union[str, TextIO, Iterable[str]]) -> Graph:
    graph, _ = parse_dimacs_with_report(source)
    return graph


def load_dimacs(path: Union[str, Path]) -> Graph:
    """Reads a .col file; a missing file surfaces as a DimacsParseError too."""
    path = Path(path)
    try:
        with path.open("r", encoding="utf-8", errors="replace") as handle:
            return parse_dimacs(handle)
    except OSError as e:
        raise DimacsParseError(f"cannot read {path}: {e.strerror or e}", 0) from e


def parse_assignment(source: Union[str, TextIO, Iterable[str]], vertex_count: int) -> List[int]:
    """
    Reads `<1-based vertex id> <color>` lines (ascending ids, one per vertex) and returns
    the raw color labels, 0-based by vertex.
    """
    labels: List[int] = []
    for line_number, raw in enumerate(_lines(source), start=1):
        line = raw.strip()
        if not line or line.startswith("c"):
            continue
        tokens = line.split()
        if len(tokens) != 2:
            raise AssignmentParseError(f"line {line_number}: expected `<vertex> <color>`, got {line!r}")
        try:
            vertex, color = int(tokens[0]), int(tokens[1])
        except ValueError:
            raise AssignmentParseError(f"line {line_number}: non-integer token in {line!r}") from None
        if vertex != len(labels) + 1:
            raise AssignmentParseError(
                f"line {line_number}: expected vertex {len(labels) + 1}, got {vertex}"
            )
        if color < 1:
            raise AssignmentParseError(f"line {line_number}: colors are positive, got {color}")
        labels.append(color)

    if len(labels) != vertex_count:
        raise AssignmentParseError(
            f"assignment covers {len(labels)} vertices but the graph has {vertex_count}"
        )
    return labels


def load_assignment(path: Union[str, Path], vertex_count: int) -> List[int]:
    path = Path(path)
    try:
        with path.open("r", encoding="utf-8", errors="replace") as handle:
            return parse_assignment(handle, vertex_count)
    except OSError as e:
        raise AssignmentParseError(f"cannot read {path}: {e.strerror or e}") from e
