"""Plan execution: semi-naive fixpoint over (origin, state, node) tuples.

Each wavefront expands a delta of search tuples against the graph, one
automaton transition at a time, deduplicating against the set of all
tuples ever seen; a tuple is expanded at most once (the delta of one round
is disjoint from every earlier round).  Results are (source, target) pairs
read off tuples whose state is final.  ExecStats counts every tuple
inserted into any total across wavefronts and view materializations, in
execution order; the per-run capacity (sum of origins x states x nodes
over wavefronts) bounds the count on any graph, cyclic or not.

`oracle_eval` is the independent ground truth: a breadth-first search of
the product of graph nodes with a Thompson epsilon-NFA built here from the
expression, sharing nothing with plan compilation or execution.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

from .graph import Graph, TermId
from .pathparser import (
    Alt,
    Inverse,
    Label,
    OneOrMore,
    PathExpr,
    Seq,
    ZeroOrMore,
    ZeroOrOne,
)
from .planner import BACKWARD, BIDIRECTIONAL, FORWARD, Automaton, Symbol, ViewDef, WavePlan

SearchTuple = tuple[TermId, int, TermId]

DEFAULT_TUPLE_BUDGET = 50_000_000


class EvaluationLimitError(RuntimeError):
    """Tuple budget exhausted; carries the count produced before stopping."""

    def __init__(self, budget: int, tuples_so_far: int):
        super().__init__(
            f"tuple budget {budget} exceeded after {tuples_so_far} search tuples"
        )
        self.budget = budget
        self.tuples_so_far = tuples_so_far


@dataclass(frozen=True)
class Bindings:
    """Optional endpoint constraints, as full term text (`<iri>` / `"lit"`)."""

    source: str | None = None
    target: str | None = None


UNBOUND = Bindings()


@dataclass
class ExecStats:
    tuples_per_iteration: list[int] = field(default_factory=list)
    total_tuples: int = 0
    iterations: int = 0
    wall_time: float = 0.0
    duplicate_expansions: int = 0
    search_capacity: int = 0


class _Meter:
    """Shared tuple accounting across wavefronts and view materializations."""

    def __init__(self, budget: int):
        self.budget = budget
        self.rounds: list[int] = []
        self.total = 0
        self.duplicate_expansions = 0
        self.search_capacity = 0
        self._pending = 0

    def insert(self) -> None:
        self.total += 1
        self._pending += 1
        if self.total > self.budget:
            raise EvaluationLimitError(self.budget, self.total)

    def flush_round(self) -> None:
        if self._pending:
            self.rounds.append(self._pending)
            self._pending = 0


class PairRelation:
    """Materialized (source, target) set indexed both ways."""

    def __init__(self, pairs: set[tuple[TermId, TermId]]):
        fwd: dict[TermId, list[TermId]] = {}
        bwd: dict[TermId, list[TermId]] = {}
        for s, t in pairs:
            fwd.setdefault(s, []).append(t)
            bwd.setdefault(t, []).append(s)
        self.pairs = frozenset(pairs)
        self._fwd = {k: tuple(sorted(v)) for k, v in fwd.items()}
        self._bwd = {k: tuple(sorted(v)) for k, v in bwd.items()}
        self.sources = tuple(sorted(self._fwd))
        self.targets = tuple(sorted(self._bwd))

    def __len__(self) -> int:
        return len(self.pairs)

    def out(self, node: TermId) -> tuple[TermId, ...]:
        return self._fwd.get(node, ())

    def into(self, node: TermId) -> tuple[TermId, ...]:
        return self._bwd.get(node, ())


def _successors(
    g: Graph, sym: Symbol, node: TermId, views: dict[int, PairRelation]
) -> tuple[TermId, ...]:
    if sym.view_id is not None:
        rel = views[sym.view_id]
        return rel.into(node) if sym.inverse else rel.out(node)
    tid = g.intern(sym.label)
    if tid is None:
        return ()
    return g.in_neighbors(node, tid) if sym.inverse else g.out_neighbors(node, tid)


def _seed_candidates(
    g: Graph, auto: Automaton, views: dict[int, PairRelation]
) -> set[TermId]:
    """Nodes that can take some start-state transition (unbound seeding)."""
    candidates: set[TermId] = set()
    for sym in auto.symbols_from(auto.start):
        if sym.view_id is not None:
            rel = views[sym.view_id]
            candidates.update(rel.targets if sym.inverse else rel.sources)
        else:
            tid = g.intern(sym.label)
            if tid is None:
                continue
            candidates.update(
                g.objects_of(tid) if sym.inverse else g.subjects_of(tid)
            )
    return candidates


def _seed_wavefront(
    g: Graph,
    auto: Automaton,
    bound_term: str | None,
    views: dict[int, PairRelation],
) -> set[SearchTuple]:
    if bound_term is not None:
        tid = g.intern(bound_term)
        if tid is None:
            return set()
        return {(tid, auto.start, tid)}
    return {(t, auto.start, t) for t in _seed_candidates(g, auto, views)}


def seed_frontier(
    p: WavePlan, g: Graph, bindings: Bindings = UNBOUND
) -> dict[str, set[SearchTuple]]:
    """Initial delta per wavefront, keyed 'left'/'right' by seeding side."""
    views = {v.view_id: materialize_view(v, g) for v in p.views}
    frontiers: dict[str, set[SearchTuple]] = {}
    if p.left_automaton is not None and p.kind in (FORWARD, BIDIRECTIONAL):
        frontiers["left"] = _seed_wavefront(g, p.left_automaton, bindings.source, views)
    if p.right_automaton is not None and p.kind in (BACKWARD, BIDIRECTIONAL):
        frontiers["right"] = _seed_wavefront(
            g, p.right_automaton, bindings.target, views
        )
    return frontiers


def expand_once(
    g: Graph,
    a: Automaton,
    delta: set[SearchTuple],
    total: set[SearchTuple],
    views: dict[int, PairRelation] | None = None,
    meter: _Meter | None = None,
) -> set[SearchTuple]:
    """One semi-naive round: expand delta, extend total, return the new delta.

    Iteration over tuples and transitions is sorted, so insertion order
    (and therefore per-iteration counts) is reproducible.
    """
    views = views or {}
    new: set[SearchTuple] = set()
    for origin, state, node in sorted(delta):
        for sym, nxt_state in a.outgoing.get(state, ()):
            for nxt_node in _successors(g, sym, node, views):
                candidate = (origin, nxt_state, nxt_node)
                if candidate not in total:
                    total.add(candidate)
                    new.add(candidate)
                    if meter is not None:
                        meter.insert()
    return new


def _run_wavefront(
    g: Graph,
    auto: Automaton,
    seeds: set[SearchTuple],
    views: dict[int, PairRelation],
    meter: _Meter,
) -> set[SearchTuple]:
    meter.search_capacity += len(seeds) * auto.state_count * g.node_count
    total = set(seeds)
    for _ in seeds:
        meter.insert()
    meter.flush_round()

    expanded: set[SearchTuple] = set()
    delta = seeds
    while delta:
        for t in delta:
            if t in expanded:
                meter.duplicate_expansions += 1
            expanded.add(t)
        delta = expand_once(g, auto, delta, total, views, meter)
        meter.flush_round()
    return total


def _pairs_at_finals(
    total: set[SearchTuple], auto: Automaton, origin_side: str
) -> set[tuple[TermId, TermId]]:
    if origin_side == "source":
        return {(o, n) for (o, q, n) in total if q in auto.finals}
    return {(n, o) for (o, q, n) in total if q in auto.finals}


def materialize_view(
    v: ViewDef,
    g: Graph,
    meter: _Meter | None = None,
    tuple_budget: int = DEFAULT_TUPLE_BUDGET,
) -> PairRelation:
    """Pair relation of the view body, always unbound; tuple production is
    charged to the supplied meter (the consuming plan's accounting)."""
    if meter is None:
        meter = _Meter(tuple_budget)
    pairs = _evaluate(v.nested_plan, g, UNBOUND, meter)
    return PairRelation(pairs)


def _evaluate(
    plan: WavePlan, g: Graph, bindings: Bindings, meter: _Meter
) -> set[tuple[TermId, TermId]]:
    views = {v.view_id: materialize_view(v, g, meter) for v in plan.views}

    if plan.kind == FORWARD:
        auto = plan.left_automaton
        total = _run_wavefront(
            g, auto, _seed_wavefront(g, auto, bindings.source, views), views, meter
        )
        pairs = _pairs_at_finals(total, auto, "source")
        nullable = auto.nullable
    elif plan.kind == BACKWARD:
        auto = plan.right_automaton
        total = _run_wavefront(
            g, auto, _seed_wavefront(g, auto, bindings.target, views), views, meter
        )
        pairs = _pairs_at_finals(total, auto, "target")
        nullable = auto.nullable
    elif plan.kind == BIDIRECTIONAL:
        left, right = plan.left_automaton, plan.right_automaton
        ltotal = _run_wavefront(
            g, left, _seed_wavefront(g, left, bindings.source, views), views, meter
        )
        rtotal = _run_wavefront(
            g, right, _seed_wavefront(g, right, bindings.target, views), views, meter
        )
        lpairs = _pairs_at_finals(ltotal, left, "source")
        rpairs = _pairs_at_finals(rtotal, right, "target")
        by_meet: dict[TermId, set[TermId]] = {}
        for x, m in lpairs:
            by_meet.setdefault(m, set()).add(x)
        pairs = set()
        for m, y in rpairs:
            for x in by_meet.get(m, ()):
                pairs.add((x, y))
        # An epsilon path on a nullable side means the other side's pairs
        # are answers on their own.
        if left.nullable:
            pairs |= rpairs
        if right.nullable:
            pairs |= lpairs
        nullable = left.nullable and right.nullable
    else:
        raise ValueError(f"unknown plan kind: {plan.kind}")

    if nullable:
        pairs |= _identity_pairs(g, bindings)

    if bindings.source is not None:
        sid = g.intern(bindings.source)
        pairs = {p for p in pairs if p[0] == sid}
    if bindings.target is not None:
        tid = g.intern(bindings.target)
        pairs = {p for p in pairs if p[1] == tid}
    return pairs


def _identity_pairs(g: Graph, bindings: Bindings) -> set[tuple[TermId, TermId]]:
    """Zero-length-path pairs: (t, t) for graph nodes, narrowed by bindings."""
    for bound in (bindings.source, bindings.target):
        if bound is not None:
            tid = g.intern(bound)
            if tid is not None and tid in set(g.nodes):
                return {(tid, tid)}
            return set()
    return {(t, t) for t in g.nodes}


def evaluate_plan(
    plan: WavePlan,
    g: Graph,
    bindings: Bindings = UNBOUND,
    tuple_budget: int = DEFAULT_TUPLE_BUDGET,
) -> tuple[set[tuple[TermId, TermId]], ExecStats]:
    """Execute a plan; returns the (source, target) id pairs and run stats."""
    started = time.perf_counter()
    meter = _Meter(tuple_budget)
    pairs = _evaluate(plan, g, bindings, meter)
    return pairs, ExecStats(
        tuples_per_iteration=list(meter.rounds),
        total_tuples=meter.total,
        iterations=len(meter.rounds),
        wall_time=time.perf_counter() - started,
        duplicate_expansions=meter.duplicate_expansions,
        search_capacity=meter.search_capacity,
    )


# -- independent oracle -------------------------------------------------------


class _EpsNfa:
    """Thompson construction: single start/accept, explicit epsilon edges."""

    def __init__(self) -> None:
        self.state_count = 0
        self._eps: list[tuple[int, int]] = []
        self._edges: list[tuple[int, str, bool, int]] = []

    def fresh(self) -> int:
        self.state_count += 1
        return self.state_count - 1

    def build(self, e: PathExpr) -> tuple[int, int]:
        if isinstance(e, Label):
            s, t = self.fresh(), self.fresh()
            self._edges.append((s, f"<{e.iri}>", False, t))
            return s, t
        if isinstance(e, Inverse):
            # A sub-machine is self-contained, so reversing exactly the
            # transitions added while building it reverses its language.
            eps_mark, edge_mark = len(self._eps), len(self._edges)
            s, t = self.build(e.inner)
            self._eps[eps_mark:] = [(b, a) for a, b in self._eps[eps_mark:]]
            self._edges[edge_mark:] = [
                (b, label, not inverse, a)
                for a, label, inverse, b in self._edges[edge_mark:]
            ]
            return t, s
        if isinstance(e, Seq):
            ls, lt = self.build(e.left)
            rs, rt = self.build(e.right)
            self._eps.append((lt, rs))
            return ls, rt
        if isinstance(e, Alt):
            s, t = self.fresh(), self.fresh()
            for branch in (e.left, e.right):
                bs, bt = self.build(branch)
                self._eps.append((s, bs))
                self._eps.append((bt, t))
            return s, t
        if isinstance(e, (ZeroOrMore, OneOrMore, ZeroOrOne)):
            s, t = self.fresh(), self.fresh()
            bs, bt = self.build(e.inner)
            self._eps.append((s, bs))
            self._eps.append((bt, t))
            if isinstance(e, (ZeroOrMore, OneOrMore)):
                self._eps.append((bt, bs))
            if isinstance(e, (ZeroOrMore, ZeroOrOne)):
                self._eps.append((s, t))
            return s, t
        raise TypeError(f"not a PathExpr: {e!r}")

    def adjacency(
        self,
    ) -> tuple[dict[int, list[int]], dict[int, list[tuple[str, bool, int]]]]:
        eps: dict[int, list[int]] = {}
        edges: dict[int, list[tuple[str, bool, int]]] = {}
        for a, b in self._eps:
            eps.setdefault(a, []).append(b)
        for a, label, inverse, b in self._edges:
            edges.setdefault(a, []).append((label, inverse, b))
        return eps, edges


def oracle_eval(
    e: PathExpr, g: Graph, bindings: Bindings = UNBOUND
) -> set[tuple[TermId, TermId]]:
    """Ground truth by product-graph BFS; intended for small graphs
    (documented up to ~1000 nodes).

    Completely independent of plan machinery: its automaton is a Thompson
    epsilon-NFA built above, traversed with epsilon closure on the fly.
    """
    nfa = _EpsNfa()
    start, accept = nfa.build(e)
    eps, edges = nfa.adjacency()

    if bindings.source is not None:
        sid = g.intern(bindings.source)
        sources = [sid] if sid is not None and sid in set(g.nodes) else []
    else:
        sources = list(g.nodes)

    labels = {label for outs in edges.values() for (label, _, _) in outs}
    predicate_of = {label: g.intern(label) for label in labels}

    results: set[tuple[TermId, TermId]] = set()
    for src in sources:
        seen: set[tuple[TermId, int]] = set()
        stack: list[tuple[TermId, int]] = [(src, start)]
        while stack:
            node, q = stack.pop()
            if (node, q) in seen:
                continue
            seen.add((node, q))
            if q == accept:
                results.add((src, node))
            for nxt in eps.get(q, ()):
                stack.append((node, nxt))
            for label, inverse, nxt in edges.get(q, ()):
                tid = predicate_of.get(label)
                if tid is None:
                    continue
                neighbors = (
                    g.in_neighbors(node, tid) if inverse else g.out_neighbors(node, tid)
                )
                for n in neighbors:
                    stack.append((n, nxt))

    if bindings.target is not None:
        tid = g.intern(bindings.target)
        results = {p for p in results if p[1] == tid}
    return results
