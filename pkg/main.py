import asyncio
from typing import List, Optional

from fastapi import FastAPI, File, Form, HTTPException, UploadFile

from app.coloring import ColoringInvariantError, SolverTimeout, normalize, verify
from app.models import ColorResponse, VerifyResponse
from app.parser import AssignmentParseError, DimacsParseError, parse_assignment, parse_dimacs
from app.solvers import ALGORITHMS, run_solver

MAX_LISTED_CONFLICTS = 10

# --- FastAPI App ---
app = FastAPI(
    title="Graph Coloring API",
    description="Color DIMACS graphs with the greedy baselines or the turbo-charged heuristic, and check colorings.",
)


async def _read_graph(col_file: UploadFile):
    content = await col_file.read()
    try:
        return parse_dimacs(content.decode("utf-8", errors="replace"))
    except DimacsParseError as e:
        raise HTTPException(status_code=400, detail=f"{col_file.filename}: {e}")


@app.get("/algorithms", response_model=List[str])
async def list_algorithms():
    return list(ALGORITHMS)


@app.post("/color", response_model=ColorResponse)
async def color_graph(
    col_file: UploadFile = File(...),
    algo: str = Form("dyn-tc"),
    seed: int = Form(1),
    k_best: Optional[int] = Form(None),
    time_limit_s: Optional[float] = Form(None),
):
    """
    Colors the uploaded .col file. The solver runs in the default executor so a long
    turbo run does not block the event loop.
    """
    if algo not in ALGORITHMS:
        raise HTTPException(status_code=400, detail=f"Unknown algorithm {algo!r}; choose from {list(ALGORITHMS)}")

    print(f"📄 Receiving graph: {col_file.filename}")
    g = await _read_graph(col_file)
    print(f"🔄 {algo} (seed {seed}) on n={g.vertex_count}, m={g.edge_count}")

    loop = asyncio.get_running_loop()
    try:
        result = await loop.run_in_executor(None, run_solver, algo, g, seed, k_best, time_limit_s)
    except SolverTimeout:
        raise HTTPException(status_code=408, detail=f"time limit of {time_limit_s}s reached")
    except ColoringInvariantError as e:
        print(f"❌ Verification failed: {e}")
        raise HTTPException(status_code=500, detail=str(e))

    print(f"✅ {result.coloring.used} colors in {result.time_ms} ms")
    return ColorResponse(
        instance=col_file.filename or "upload.col",
        n=g.vertex_count,
        m=g.edge_count,
        algorithm=algo,
        seed=seed,
        colors=result.coloring.used,
        time_ms=result.time_ms,
        assignment=result.coloring.colors,
        stats=result.stats,
    )


@app.post("/verify", response_model=VerifyResponse)
async def verify_coloring(
    col_file: UploadFile = File(...),
    assignment_file: UploadFile = File(...),
):
    g = await _read_graph(col_file)
    content = await assignment_file.read()
    try:
        labels = parse_assignment(content.decode("utf-8", errors="replace"), g.vertex_count)
    except AssignmentParseError as e:
        raise HTTPException(status_code=400, detail=f"{assignment_file.filename}: {e}")

    coloring = normalize(labels)
    conflicts = verify(g, coloring)
    if conflicts:
        print(f"⚠️ {len(conflicts)} conflicting edge(s) in {assignment_file.filename}")
    return VerifyResponse(
        ok=not conflicts,
        colors=coloring.used,
        conflicts=[[u + 1, v + 1] for u, v in conflicts[:MAX_LISTED_CONFLICTS]],
    )
