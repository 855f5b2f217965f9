"""
Defines Pydantic models for colorings, run statistics, benchmark records & API payloads.
"""

from typing import Dict, List, Optional

from pydantic import BaseModel, Field, model_validator


class Coloring(BaseModel):
    """Vertex -> color assignment (1-based colors, contiguous range 1..used)."""
    colors: List[int]
    used: int

    @model_validator(mode="after")
    def _check_contiguous(self):
        if not self.colors:
            if self.used != 0:
                raise ValueError("An empty coloring must use 0 colors.")
            return self
        present = set(self.colors)
        if min(present) < 1:
            raise ValueError("Colors are 1-based; found a color below 1.")
        if present != set(range(1, self.used + 1)):
            raise ValueError(
                f"Colors in use must be exactly 1..{self.used}, got {sorted(present)[:10]}..."
            )
        return self

    @classmethod
    def uniform(cls, vertex_count: int) -> "Coloring":
        """Every vertex on color 1 (the start state of the edge-by-edge run)."""
        return cls.model_construct(colors=[1] * vertex_count, used=1 if vertex_count else 0)

    @classmethod
    def from_labels(cls, labels: List[int]) -> "Coloring":
        """Order-preserving compaction of arbitrary positive labels to 1..used."""
        ranks = {label: rank for rank, label in enumerate(sorted(set(labels)), start=1)}
        return cls.model_construct(colors=[ranks[label] for label in labels], used=len(ranks))

    def hamming(self, other: "Coloring") -> int:
        return sum(1 for a, b in zip(self.colors, other.colors) if a != b)


class RunStats(BaseModel):
    """Counters reported by one turbo (or edge-greedy) run."""
    regret_events: int = 0
    rollbacks_attempted: int = 0
    rollbacks_accepted: int = 0
    final_colors: int = 0
    edge_additions: int = 0
    elapsed: float = 0.0

    @model_validator(mode="after")
    def _check_order(self):
        if not (self.rollbacks_accepted <= self.rollbacks_attempted <= self.regret_events):
            raise ValueError("Expected rollbacks_accepted <= rollbacks_attempted <= regret_events.")
        return self


class RepairLimits(BaseModel):
    """Throttles for the repair subroutine and the run as a whole."""
    enabled: bool = True
    max_attempts: Optional[int] = None  # None -> 4 * k_best
    cover_limit: int = Field(default=256, ge=1)
    max_edit_k: int = Field(default=64, ge=1)
    search_nodes: int = Field(default=20000, ge=1)
    time_limit_s: Optional[float] = None
    audit_steps: int = Field(default=0, ge=0)
    interchange: bool = True  # repairs may move non-cover vertices by two-color swaps

    def attempt_cap(self, k_best: int) -> int:
        return self.max_attempts if self.max_attempts is not None else 4 * k_best


class ReferenceValue(BaseModel):
    """Published numbers for one instance; chi is parenthesized when not proven exact."""
    instance: str
    chi: Optional[int] = None
    exact: bool = False
    dyn_tc: Optional[int] = None
    greedy: Optional[int] = None
    rcc: Optional[int] = None
    tabu: Optional[int] = None
    search_tree: Optional[int] = None

    def chi_label(self) -> str:
        if self.chi is None:
            return "?"
        return str(self.chi) if self.exact else f"({self.chi})"


class BenchRecord(BaseModel):
    """One (instance, algorithm, seed) cell. Field order is the CSV column order."""
    instance: str
    n: int
    m: int
    algorithm: str
    seed: int
    colors: Optional[int] = None
    time_ms: Optional[int] = None
    regret_events: int = 0
    rollbacks_accepted: int = 0
    reference_chi: Optional[int] = None
    reference_exact: bool = False
    status: str = "ok"
    error: str = ""

    @model_validator(mode="after")
    def _check_reference(self):
        if (
            self.status == "ok"
            and self.reference_exact
            and self.reference_chi is not None
            and self.colors is not None
            and self.colors < self.reference_chi
        ):
            raise ValueError(
                f"{self.instance}: {self.colors} colors is below the proven chromatic number {self.reference_chi}."
            )
        return self


class BenchSummaryRow(BaseModel):
    instance: str
    n: int
    m: int
    best: Dict[str, Optional[int]]
    reference: Optional[ReferenceValue] = None


class ColorResponse(BaseModel):
    instance: str
    n: int
    m: int
    algorithm: str
    seed: int
    colors: int
    time_ms: int
    assignment: List[int]
    stats: Optional[RunStats] = None


class VerifyResponse(BaseModel):
    ok: bool
    colors: int
    conflicts: List[List[int]]


class SolveResult(BaseModel):
    algorithm: str
    seed: int
    coloring: Coloring
    time_ms: int
    stats: Optional[RunStats] = None
