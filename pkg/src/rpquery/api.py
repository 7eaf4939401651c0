"""HTTP front end over the service layer.

Run with: uvicorn rpquery.api:app
"""

from __future__ import annotations

from fastapi import FastAPI, HTTPException
from pydantic import BaseModel

from . import __version__, service
from .evaluator import EvaluationLimitError
from .graph import NTriplesError
from .pathparser import PathSyntaxError
from .service import (
    BenchRequest,
    BenchResponse,
    ExplainRequest,
    ExplainResponse,
    QueryRequest,
    QueryResponse,
    StatsResponse,
    UnknownPlanError,
)

app = FastAPI(
    title="rpquery",
    version=__version__,
    description="Regular path queries over edge-labeled RDF graphs with "
    "cost-based plan selection.",
)


class StatsRequest(BaseModel):
    graph_path: str


def _http_error(exc: Exception) -> HTTPException:
    if isinstance(exc, FileNotFoundError):
        return HTTPException(status_code=404, detail=str(exc))
    if isinstance(exc, (PathSyntaxError, NTriplesError, UnknownPlanError)):
        return HTTPException(status_code=400, detail=str(exc))
    if isinstance(exc, EvaluationLimitError):
        return HTTPException(status_code=422, detail=str(exc))
    raise exc


@app.get("/health")
def health() -> dict[str, str]:
    return {"status": "ok", "version": __version__}


@app.post("/stats", response_model=StatsResponse)
def stats(req: StatsRequest) -> StatsResponse:
    try:
        return service.graph_stats(req.graph_path)
    except Exception as exc:
        raise _http_error(exc) from exc


@app.post("/explain", response_model=ExplainResponse)
def explain(req: ExplainRequest) -> ExplainResponse:
    try:
        return service.explain(req)
    except Exception as exc:
        raise _http_error(exc) from exc


@app.post("/query", response_model=QueryResponse)
def query(req: QueryRequest) -> QueryResponse:
    try:
        return service.run_query(req)
    except Exception as exc:
        raise _http_error(exc) from exc


@app.post("/bench", response_model=BenchResponse)
def bench(req: BenchRequest) -> BenchResponse:
    try:
        return service.run_bench(req)
    except Exception as exc:
        raise _http_error(exc) from exc
