"""Command-line client over the service layer.

Data rows go to stdout as TSV; diagnostics go to stderr.  Exit codes:
1 parse error (expression or graph), 2 I/O error, 3 tuple budget exceeded.
"""

from __future__ import annotations

import functools
import json
import sys

import click

from . import service
from .evaluator import EvaluationLimitError
from .graph import NTriplesError
from .pathparser import PathSyntaxError
from .service import BenchQuery, BenchRequest, ExplainRequest, QueryRequest, UnknownPlanError


def _guarded(fn):
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            fn(*args, **kwargs)
        except (PathSyntaxError, NTriplesError, UnknownPlanError) as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(1)
        except EvaluationLimitError as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(3)
        except OSError as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(2)

    return wrapper


@click.group()
def main() -> None:
    """Regular path queries over N-Triples graphs with cost-based plans."""


@main.command()
@click.option("--graph", "graph_path", required=True, help="N-Triples file.")
@_guarded
def stats(graph_path: str) -> None:
    """Per-label statistics as TSV."""
    resp = service.graph_stats(graph_path)
    click.echo("label\tcount\tdistinct_subj\tdistinct_obj")
    for row in resp.rows:
        click.echo(
            f"{row.label}\t{row.count}\t{row.distinct_subjects}\t{row.distinct_objects}"
        )
    click.echo(f"# nodes={resp.node_count} triples={resp.triple_count}")


@main.command()
@click.option("--graph", "graph_path", required=True, help="N-Triples file.")
@click.option("--path", "path_expr", required=True, help="Property-path expression.")
@click.option("--source", default=None, help="Bind the source endpoint (term text).")
@click.option("--target", default=None, help="Bind the target endpoint (term text).")
@click.option("--plan", "plan_override", default=None, help="Plan id for dot output.")
@click.option(
    "--format",
    "fmt",
    type=click.Choice(["json", "dot"]),
    default="json",
    show_default=True,
)
@_guarded
def explain(graph_path, path_expr, source, target, plan_override, fmt) -> None:
    """Enumerate plans with cost estimates; json table or dot of one plan."""
    resp = service.explain(
        ExplainRequest(
            graph_path=graph_path,
            path_expr=path_expr,
            source=source,
            target=target,
            plan_override=plan_override,
            include_dot=fmt == "dot",
        )
    )
    if fmt == "dot":
        click.echo(resp.dot, nl=False)
    else:
        entries = [e.model_dump() for e in resp.plans]
        click.echo(json.dumps(entries, indent=2))


@main.command()
@click.option("--graph", "graph_path", required=True, help="N-Triples file.")
@click.option("--path", "path_expr", required=True, help="Property-path expression.")
@click.option("--source", default=None, help="Bind the source endpoint (term text).")
@click.option("--target", default=None, help="Bind the target endpoint (term text).")
@click.option("--plan", "plan_override", default=None, help="Execute this plan id.")
@click.option("--limit", type=int, default=None, help="Cap on result rows.")
@click.option("--tuple-budget", type=int, default=None, help="Search tuple cap.")
@_guarded
def query(
    graph_path, path_expr, source, target, plan_override, limit, tuple_budget
) -> None:
    """Evaluate a path query; unique sorted source/target rows as TSV."""
    resp = service.run_query(
        QueryRequest(
            graph_path=graph_path,
            path_expr=path_expr,
            source=source,
            target=target,
            plan_override=plan_override,
            limit=limit,
            tuple_budget=tuple_budget,
        )
    )
    for s, t in resp.rows:
        click.echo(f"{s}\t{t}")
    click.echo(
        f"plan={resp.plan_id} est={resp.est_total_tuples:.6g} "
        f"actual_tuples={resp.actual_tuples} iterations={resp.iterations} "
        f"time_ms={resp.time_ms:.3f}",
        err=True,
    )


@main.command()
@click.option("--graph", "graph_path", required=True, help="N-Triples file.")
@click.option(
    "--queries",
    "queries_path",
    required=True,
    help="File with one expression per line, optional \\tsource\\ttarget columns.",
)
@click.option("--repeat", type=int, default=1, show_default=True)
@_guarded
def bench(graph_path: str, queries_path: str, repeat: int) -> None:
    """Run every enumerated plan of every query; TSV of costs and timings."""
    queries = []
    with open(queries_path, encoding="utf-8") as fh:
        for raw in fh:
            line = raw.rstrip("\n")
            if not line.strip() or line.lstrip().startswith("#"):
                continue
            cols = line.split("\t")
            queries.append(
                BenchQuery(
                    path_expr=cols[0],
                    source=cols[1] if len(cols) > 1 and cols[1] else None,
                    target=cols[2] if len(cols) > 2 and cols[2] else None,
                )
            )
    resp = service.run_bench(
        BenchRequest(graph_path=graph_path, queries=queries, repeat=repeat)
    )
    click.echo("query\tplan\test_tuples\tactual_tuples\tmedian_ms")
    for row in resp.rows:
        click.echo(
            f"{row.query}\t{row.plan_id}\t{row.est_tuples:.6g}"
            f"\t{row.actual_tuples}\t{row.median_ms:.3f}"
        )
    for failure in resp.failures:
        click.echo(f"error: {failure}", err=True)
    if queries and len(resp.failures) == len(queries):
        sys.exit(1)


if __name__ == "__main__":
    main()
