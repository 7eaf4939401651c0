from __future__ import annotations

from pathlib import Path

import pytest
from fastapi.testclient import TestClient

from rpquery import service
from rpquery.api import app
from rpquery.service import (
    BenchQuery,
    BenchRequest,
    ExplainRequest,
    QueryRequest,
    run_bench,
    run_query,
)

FIXTURES = Path(__file__).parent / "fixtures"
CHAIN = str(FIXTURES / "chain.nt")
CHAIN_AB = str(FIXTURES / "chain_ab.nt")


@pytest.fixture
def client():
    return TestClient(app)


class TestGraphCache:
    def test_same_file_reuses_graph(self):
        first, _ = service.get_graph(CHAIN)
        second, _ = service.get_graph(CHAIN)
        assert first is second

    def test_modified_file_reloads(self, tmp_path):
        path = tmp_path / "g.nt"
        path.write_text("<s> <p> <o> .\n")
        g1, _ = service.get_graph(str(path))
        import os

        os.utime(path, ns=(1, 1))
        path.write_text("<s> <p> <o> .\n<s> <p> <o2> .\n")
        g2, _ = service.get_graph(str(path))
        assert g2.triple_count == 2
        assert g1 is not g2


class TestServiceLayer:
    def test_query_rows_sorted_and_limited(self):
        resp = run_query(QueryRequest(graph_path=CHAIN, path_expr="<a>+", limit=2))
        assert resp.rows == [("<x1>", "<x2>"), ("<x1>", "<x3>")]
        assert resp.actual_tuples > 0
        assert resp.iterations >= 1

    def test_bench_failures_do_not_raise(self):
        resp = run_bench(
            BenchRequest(
                graph_path=CHAIN,
                queries=[BenchQuery(path_expr="<a"), BenchQuery(path_expr="<a>")],
            )
        )
        assert len(resp.failures) == 1
        assert {r.plan_id for r in resp.rows} == {"F", "B"}


class TestApi:
    def test_health(self, client):
        assert client.get("/health").json()["status"] == "ok"

    def test_stats(self, client):
        resp = client.post("/stats", json={"graph_path": CHAIN})
        assert resp.status_code == 200
        body = resp.json()
        assert body["node_count"] == 3
        assert body["rows"] == [
            {"label": "<a>", "count": 2, "distinct_subjects": 2, "distinct_objects": 2}
        ]

    def test_explain(self, client):
        resp = client.post(
            "/explain", json={"graph_path": CHAIN_AB, "path_expr": "<a>/<b>"}
        )
        assert resp.status_code == 200
        plans = resp.json()["plans"]
        assert len(plans) == 3
        assert sum(p["chosen"] for p in plans) == 1

    def test_explain_with_dot(self, client):
        resp = client.post(
            "/explain",
            json={"graph_path": CHAIN_AB, "path_expr": "<a>/<b>", "include_dot": True},
        )
        assert resp.json()["dot"].startswith("digraph")

    def test_query(self, client):
        resp = client.post(
            "/query",
            json={"graph_path": CHAIN, "path_expr": "<a>+", "source": "<x1>"},
        )
        assert resp.status_code == 200
        assert resp.json()["rows"] == [["<x1>", "<x2>"], ["<x1>", "<x3>"]]

    def test_query_with_override(self, client):
        for plan_id in ("F", "B", "B1"):
            resp = client.post(
                "/query",
                json={
                    "graph_path": CHAIN_AB,
                    "path_expr": "<a>/<b>",
                    "plan_override": plan_id,
                },
            )
            assert resp.status_code == 200
            assert resp.json()["plan_id"] == plan_id
            assert resp.json()["rows"] == [["<x1>", "<x3>"]]

    def test_bench(self, client):
        resp = client.post(
            "/bench",
            json={
                "graph_path": CHAIN,
                "queries": [{"path_expr": "<a>"}],
                "repeat": 2,
            },
        )
        assert resp.status_code == 200
        assert len(resp.json()["rows"]) == 2

    def test_missing_graph_404(self, client):
        resp = client.post("/stats", json={"graph_path": "/nonexistent.nt"})
        assert resp.status_code == 404

    def test_bad_expression_400(self, client):
        resp = client.post(
            "/query", json={"graph_path": CHAIN, "path_expr": "!(<a>)"}
        )
        assert resp.status_code == 400
        assert "not supported" in resp.json()["detail"]

    def test_unknown_plan_400(self, client):
        resp = client.post(
            "/query",
            json={"graph_path": CHAIN, "path_expr": "<a>", "plan_override": "Q7"},
        )
        assert resp.status_code == 400

    def test_budget_422(self, client):
        resp = client.post(
            "/query",
            json={"graph_path": CHAIN, "path_expr": "<a>+", "tuple_budget": 1},
        )
        assert resp.status_code == 422

    def test_malformed_graph_400(self, client):
        resp = client.post(
            "/stats", json={"graph_path": str(FIXTURES / "malformed.nt")}
        )
        assert resp.status_code == 400
        assert "line 3" in resp.json()["detail"]
