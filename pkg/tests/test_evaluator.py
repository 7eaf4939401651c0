from __future__ import annotations

import random

import pytest

from rpquery.costmodel import choose_best_plan
from rpquery.evaluator import (
    Bindings,
    EvaluationLimitError,
    UNBOUND,
    evaluate_plan,
    expand_once,
    materialize_view,
    oracle_eval,
    seed_frontier,
)
from rpquery.graph import compute_stats, load_ntriples
from rpquery.pathparser import parse_path
from rpquery.planner import compile_automaton, enumerate_plans

from conftest import make_graph, random_expr, random_multigraph, term


def _pairs_by_name(g, pairs):
    return sorted((g.term(s), g.term(t)) for s, t in pairs)


def _forward_plan(g, expr_text):
    plans = enumerate_plans(parse_path(expr_text), compute_stats(g))
    return next(p for p in plans if p.plan_id == "F")


def _all_plans(g, expr_text, bindings=UNBOUND):
    return enumerate_plans(parse_path(expr_text), compute_stats(g), bindings)


class TestSeeding:
    def test_bound_source(self, chain3):
        plan = _forward_plan(chain3, "<a>")
        frontiers = seed_frontier(plan, chain3, Bindings(source="<x1>"))
        x1 = term(chain3, "x1")
        assert frontiers["left"] == {(x1, 0, x1)}

    def test_unbound_seeds_only_matching_subjects(self):
        g = make_graph([("n1", "a", "n2"), ("n1", "a", "n3")])
        plan = _forward_plan(g, "<a>")
        frontiers = seed_frontier(plan, g)
        n1 = term(g, "n1")
        assert frontiers["left"] == {(n1, 0, n1)}

    def test_bound_term_missing_from_dictionary(self, chain3):
        plan = _forward_plan(chain3, "<a>")
        frontiers = seed_frontier(plan, chain3, Bindings(source="<ghost>"))
        assert frontiers["left"] == set()

    def test_bidirectional_has_both_frontiers(self, chain3):
        plans = _all_plans(chain3, "<a>/<a>")
        bidi = next(p for p in plans if p.plan_id == "B1")
        frontiers = seed_frontier(bidi, chain3)
        assert set(frontiers) == {"left", "right"}
        assert frontiers["left"] and frontiers["right"]


class TestExpandOnce:
    def test_single_step(self):
        g = make_graph([("n1", "a", "n2"), ("n2", "a", "n3")])
        auto = compile_automaton(parse_path("<a>+"))
        n1, n2 = term(g, "n1"), term(g, "n2")
        total = {(n1, 0, n1)}
        new = expand_once(g, auto, {(n1, 0, n1)}, total)
        assert new == {(n1, 1, n2)}
        assert total == {(n1, 0, n1), (n1, 1, n2)}

    def test_empty_delta_is_fixpoint(self, chain3):
        auto = compile_automaton(parse_path("<a>+"))
        assert expand_once(chain3, auto, set(), {(0, 0, 0)}) == set()

    def test_cycle_dedups_against_total(self, cycle2):
        auto = compile_automaton(parse_path("<a>+"))
        n1 = term(cycle2, "n1")
        total = {(n1, 0, n1)}
        d1 = expand_once(cycle2, auto, {(n1, 0, n1)}, total)
        d2 = expand_once(cycle2, auto, d1, total)
        d3 = expand_once(cycle2, auto, d2, total)
        assert d1 and d2
        assert d3 == set()


class TestEvaluate:
    def test_plus_on_chain(self, chain3):
        for plan in _all_plans(chain3, "<a>+"):
            pairs, _ = evaluate_plan(plan, chain3)
            assert _pairs_by_name(chain3, pairs) == [
                ("<x1>", "<x2>"),
                ("<x1>", "<x3>"),
                ("<x2>", "<x3>"),
            ]

    def test_star_on_cycle(self, cycle2):
        for plan in _all_plans(cycle2, "<a>*"):
            pairs, _ = evaluate_plan(plan, cycle2)
            assert _pairs_by_name(cycle2, pairs) == [
                ("<n1>", "<n1>"),
                ("<n1>", "<n2>"),
                ("<n2>", "<n1>"),
                ("<n2>", "<n2>"),
            ]

    def test_inverse(self):
        g = make_graph([("n1", "a", "n2")])
        for plan in _all_plans(g, "^<a>"):
            pairs, _ = evaluate_plan(plan, g)
            assert _pairs_by_name(g, pairs) == [("<n2>", "<n1>")]

    def test_bound_target_filters(self, chain3):
        for plan in _all_plans(chain3, "<a>+", Bindings(target="<x3>")):
            pairs, _ = evaluate_plan(plan, chain3, Bindings(target="<x3>"))
            assert _pairs_by_name(chain3, pairs) == [
                ("<x1>", "<x3>"),
                ("<x2>", "<x3>"),
            ]

    def test_budget_exceeded(self, chain3):
        plan = _forward_plan(chain3, "<a>+")
        with pytest.raises(EvaluationLimitError) as err:
            evaluate_plan(plan, chain3, tuple_budget=2)
        assert err.value.tuples_so_far == 3

    def test_stats_account_every_insert(self, chain3):
        plan = _forward_plan(chain3, "<a>+")
        _, stats = evaluate_plan(plan, chain3)
        assert stats.total_tuples == sum(stats.tuples_per_iteration)
        assert stats.iterations == len(stats.tuples_per_iteration)
        assert stats.total_tuples <= stats.search_capacity
        assert stats.duplicate_expansions == 0
        assert stats.wall_time >= 0.0


class TestViews:
    def _view_plan(self, g, expr_text):
        plans = _all_plans(g, expr_text)
        return next(p for p in plans if p.views)

    def test_materialize_seq_body(self):
        g = make_graph([("n1", "a", "n2"), ("n2", "b", "n3")])
        plan = self._view_plan(g, "(<a>/<b>)*")
        rel = materialize_view(plan.views[0], g)
        assert rel.pairs == {(term(g, "n1"), term(g, "n3"))}

    def test_outer_closure_over_view(self):
        g = make_graph([("n1", "a", "n2"), ("n2", "b", "n3")])
        plan = self._view_plan(g, "(<a>/<b>)*")
        pairs, _ = evaluate_plan(plan, g)
        identity = {(t, t) for t in g.nodes}
        assert pairs == identity | {(term(g, "n1"), term(g, "n3"))}

    def test_empty_view_gives_identity_only(self):
        g = make_graph([("n1", "a", "n2")])
        plan = self._view_plan(g, "(<b>/<b>)*")
        pairs, _ = evaluate_plan(plan, g)
        assert pairs == {(t, t) for t in g.nodes}

    def test_view_tuples_charged_to_outer_plan(self):
        g = make_graph([("n1", "a", "n2"), ("n2", "b", "n3")])
        plan = self._view_plan(g, "(<a>/<b>)*")
        _, stats = evaluate_plan(plan, g)
        nested_only, _ = evaluate_plan(plan.views[0].nested_plan, g)
        assert stats.total_tuples > len(nested_only)


class TestOracle:
    def test_empty_graph(self):
        g = load_ntriples("")
        assert oracle_eval(parse_path("<a>"), g) == set()

    def test_zero_or_one(self):
        g = make_graph([("n1", "a", "n2")])
        got = oracle_eval(parse_path("<a>?"), g)
        n1, n2 = term(g, "n1"), term(g, "n2")
        assert got == {(n1, n1), (n2, n2), (n1, n2)}

    def test_matches_plans_randomized(self):
        rng = random.Random(101)
        for _ in range(60):
            g, nodes = random_multigraph(rng, max_nodes=15, max_triples=40)
            e = random_expr(rng, 3)
            mode = rng.randrange(3)
            b = UNBOUND
            if mode == 1:
                b = Bindings(source=rng.choice(nodes))
            elif mode == 2:
                b = Bindings(target=rng.choice(nodes))
            want = oracle_eval(e, g, b)
            for plan in enumerate_plans(e, compute_stats(g), b):
                got, _ = evaluate_plan(plan, g, b)
                assert got == want, f"{plan.plan_id} diverged from oracle"


class TestLaws:
    def test_inverse_transpose(self):
        rng = random.Random(103)
        for _ in range(30):
            g, _ = random_multigraph(rng, max_nodes=12, max_triples=30)
            e = random_expr(rng, 3)
            stats = compute_stats(g)
            plain, _ = choose_and_eval(e, g, stats)
            from rpquery.pathparser import Inverse

            inverted, _ = choose_and_eval(Inverse(e), g, stats)
            assert inverted == {(t, s) for (s, t) in plain}

    def test_kleene_closure(self):
        rng = random.Random(107)
        for _ in range(30):
            g, _ = random_multigraph(rng, max_nodes=10, max_triples=25)
            e = random_expr(rng, 2, allow_kleene=False)
            stats = compute_stats(g)
            base, _ = choose_and_eval(e, g, stats)
            from rpquery.pathparser import ZeroOrMore

            starred, _ = choose_and_eval(ZeroOrMore(e), g, stats)
            assert starred == _closure_by_squaring(base, set(g.nodes))


def choose_and_eval(e, g, stats, bindings=UNBOUND):
    plans = enumerate_plans(e, stats, bindings)
    plan, _ = choose_best_plan(plans, stats, bindings)
    return evaluate_plan(plan, g, bindings)


def _closure_by_squaring(pairs, nodes):
    """Reflexive-transitive closure, independent route: iterate R = R u R.R."""
    closure = {(t, t) for t in nodes} | set(pairs)
    while True:
        by_src = {}
        for s, t in closure:
            by_src.setdefault(s, set()).add(t)
        bigger = set(closure)
        for s, t in closure:
            bigger.update((s, u) for u in by_src.get(t, ()))
        if bigger == closure:
            return closure
        closure = bigger
