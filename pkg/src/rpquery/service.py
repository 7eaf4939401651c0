"""Service layer: request/response models and the operations behind both
the HTTP API and the CLI.

Graphs are loaded once and cached per file (keyed by mtime and size), so a
long-running server pays ingestion once per dataset; the CLI shares the
same code path.
"""

from __future__ import annotations

import statistics
import threading
import time
from pathlib import Path

from pydantic import BaseModel, Field

from .costmodel import choose_best_plan, estimate_plan_cost
from .evaluator import Bindings, evaluate_plan
from .graph import Graph, LabelStats, compute_stats, load_ntriples
from .pathparser import parse_path
from .planner import WavePlan, enumerate_plans, plan_to_dot


class UnknownPlanError(ValueError):
    def __init__(self, plan_id: str, known: list[str]):
        super().__init__(f"unknown plan id {plan_id!r}; available: {', '.join(known)}")


class LabelRow(BaseModel):
    label: str
    count: int
    distinct_subjects: int
    distinct_objects: int


class StatsResponse(BaseModel):
    rows: list[LabelRow]
    node_count: int
    triple_count: int


class PlanEntry(BaseModel):
    plan_id: str
    kind: str
    est_total_tuples: float
    saturated: bool
    chosen: bool


class ExplainRequest(BaseModel):
    graph_path: str
    path_expr: str
    source: str | None = None
    target: str | None = None
    plan_override: str | None = None
    include_dot: bool = False


class ExplainResponse(BaseModel):
    plans: list[PlanEntry]
    dot: str | None = None


class QueryRequest(BaseModel):
    graph_path: str
    path_expr: str
    source: str | None = None
    target: str | None = None
    plan_override: str | None = None
    limit: int | None = Field(default=None, ge=0)
    tuple_budget: int | None = Field(default=None, ge=1)


class QueryResponse(BaseModel):
    rows: list[tuple[str, str]]
    plan_id: str
    est_total_tuples: float
    actual_tuples: int
    iterations: int
    time_ms: float


class BenchQuery(BaseModel):
    path_expr: str
    source: str | None = None
    target: str | None = None


class BenchRequest(BaseModel):
    graph_path: str
    queries: list[BenchQuery]
    repeat: int = Field(default=1, ge=1)


class BenchRow(BaseModel):
    query: str
    plan_id: str
    est_tuples: float
    actual_tuples: int
    median_ms: float


class BenchResponse(BaseModel):
    rows: list[BenchRow]
    failures: list[str]


_cache_lock = threading.Lock()
_graph_cache: dict[str, tuple[tuple[int, int], Graph, LabelStats]] = {}


def get_graph(graph_path: str) -> tuple[Graph, LabelStats]:
    """Load (or reuse) a graph and its statistics for a file path."""
    path = Path(graph_path)
    stat = path.stat()
    key = (stat.st_mtime_ns, stat.st_size)
    with _cache_lock:
        cached = _graph_cache.get(str(path))
        if cached is not None and cached[0] == key:
            return cached[1], cached[2]
    g = load_ntriples(path.read_text(encoding="utf-8"))
    stats = compute_stats(g)
    with _cache_lock:
        _graph_cache[str(path)] = (key, g, stats)
    return g, stats


def graph_stats(graph_path: str) -> StatsResponse:
    g, stats = get_graph(graph_path)
    rows = [
        LabelRow(
            label=label,
            count=c.count,
            distinct_subjects=c.distinct_subjects,
            distinct_objects=c.distinct_objects,
        )
        for label, c in sorted(stats.labels.items())
    ]
    return StatsResponse(rows=rows, node_count=g.node_count, triple_count=g.triple_count)


def _plan_table(
    graph_path: str, path_expr: str, bindings: Bindings
) -> tuple[Graph, LabelStats, list[WavePlan], WavePlan]:
    g, stats = get_graph(graph_path)
    expr = parse_path(path_expr)
    plans = enumerate_plans(expr, stats, bindings)
    chosen, _ = choose_best_plan(plans, stats, bindings)
    return g, stats, plans, chosen


def _find_plan(plans: list[WavePlan], plan_id: str) -> WavePlan:
    for p in plans:
        if p.plan_id == plan_id:
            return p
    raise UnknownPlanError(plan_id, [p.plan_id for p in plans])


def explain(req: ExplainRequest) -> ExplainResponse:
    bindings = Bindings(source=req.source, target=req.target)
    g, stats, plans, chosen = _plan_table(req.graph_path, req.path_expr, bindings)
    entries = [
        PlanEntry(
            plan_id=p.plan_id,
            kind=p.kind,
            est_total_tuples=est.est_total_tuples,
            saturated=est.saturated,
            chosen=p.plan_id == chosen.plan_id,
        )
        for p in plans
        for est in [estimate_plan_cost(p, stats, bindings)]
    ]
    entries.sort(key=lambda e: (e.est_total_tuples, e.plan_id))
    dot = None
    if req.include_dot:
        shown = _find_plan(plans, req.plan_override) if req.plan_override else chosen
        dot = plan_to_dot(shown)
    return ExplainResponse(plans=entries, dot=dot)


def run_query(req: QueryRequest) -> QueryResponse:
    bindings = Bindings(source=req.source, target=req.target)
    g, stats, plans, chosen = _plan_table(req.graph_path, req.path_expr, bindings)
    plan = _find_plan(plans, req.plan_override) if req.plan_override else chosen
    est = estimate_plan_cost(plan, stats, bindings)

    kwargs = {}
    if req.tuple_budget is not None:
        kwargs["tuple_budget"] = req.tuple_budget
    pairs, exec_stats = evaluate_plan(plan, g, bindings, **kwargs)

    rows = sorted((g.term(s), g.term(t)) for s, t in pairs)
    if req.limit is not None:
        rows = rows[: req.limit]
    return QueryResponse(
        rows=rows,
        plan_id=plan.plan_id,
        est_total_tuples=est.est_total_tuples,
        actual_tuples=exec_stats.total_tuples,
        iterations=exec_stats.iterations,
        time_ms=exec_stats.wall_time * 1000.0,
    )


def _bench_label(q: BenchQuery) -> str:
    label = q.path_expr
    if q.source is not None:
        label += f" source={q.source}"
    if q.target is not None:
        label += f" target={q.target}"
    return label


def run_bench(req: BenchRequest) -> BenchResponse:
    """Execute every enumerated plan of every query `repeat` times."""
    rows: list[BenchRow] = []
    failures: list[str] = []
    for q in req.queries:
        try:
            bindings = Bindings(source=q.source, target=q.target)
            g, stats, plans, _ = _plan_table(req.graph_path, q.path_expr, bindings)
            for plan in plans:
                est = estimate_plan_cost(plan, stats, bindings)
                timings = []
                actual = 0
                for _ in range(req.repeat):
                    started = time.perf_counter()
                    _, exec_stats = evaluate_plan(plan, g, bindings)
                    timings.append((time.perf_counter() - started) * 1000.0)
                    actual = exec_stats.total_tuples
                rows.append(
                    BenchRow(
                        query=_bench_label(q),
                        plan_id=plan.plan_id,
                        est_tuples=est.est_total_tuples,
                        actual_tuples=actual,
                        median_ms=statistics.median(timings),
                    )
                )
        except Exception as exc:  # noqa: BLE001 - one bad query must not stop the run
            failures.append(f"{_bench_label(q)}: {exc}")
    return BenchResponse(rows=rows, failures=failures)
