"""Symbolic cost estimation: expected search tuples for a plan.

The estimator replays the fixpoint over the automaton alone, propagating
expected tuple counts instead of tuples.  Per-label fan-out is assumed
uniform and independent across steps (count / distinct subjects for
forward traversal, count / distinct objects for inverse).  Semi-naive
deduplication is modeled by capping each state's cumulative count at the
reachable tuple space (seed estimate x node count) and cutting propagation
out of saturated states.  Views charge their nested plan's estimate plus
the estimated relation size once; bidirectional plans charge both
wavefronts plus an estimated join output.
"""

from __future__ import annotations

from dataclasses import dataclass

from .graph import LabelStats
from .planner import (
    BACKWARD,
    BIDIRECTIONAL,
    FORWARD,
    Automaton,
    Symbol,
    WavePlan,
    plan_signature,
)

_STOP_THRESHOLD = 0.5


@dataclass(frozen=True)
class CostEstimate:
    est_total_tuples: float
    per_iteration: tuple[float, ...]
    saturated: bool


class CardinalityModel:
    """Fan-out and seed cardinalities from label statistics plus estimated
    view relation sizes."""

    def __init__(self, stats: LabelStats, view_sizes: dict[int, float] | None = None):
        self.stats = stats
        self.node_count = stats.node_count
        self.view_sizes = view_sizes or {}

    def _view_endpoints(self, view_id: int) -> float:
        size = self.view_sizes.get(view_id, 0.0)
        return min(size, float(self.node_count))

    def fanout(self, sym: Symbol) -> float:
        if sym.view_id is not None:
            size = self.view_sizes.get(sym.view_id, 0.0)
            return size / max(1.0, self._view_endpoints(sym.view_id))
        counts = self.stats.counts(sym.label)
        if counts is None:
            return 0.0
        divisor = counts.distinct_objects if sym.inverse else counts.distinct_subjects
        return counts.count / divisor

    def seed_count(self, sym: Symbol) -> float:
        if sym.view_id is not None:
            return self._view_endpoints(sym.view_id)
        counts = self.stats.counts(sym.label)
        if counts is None:
            return 0.0
        return float(counts.distinct_objects if sym.inverse else counts.distinct_subjects)

    def seed_estimate(self, symbols: tuple[Symbol, ...], bound: bool) -> float:
        if bound:
            return 1.0
        total = sum(self.seed_count(sym) for sym in symbols)
        return min(total, float(self.node_count))


def label_fanout(stats: LabelStats, label: str, direction: str) -> float:
    """Average out-degree of a label: count over distinct subjects
    ('forward') or distinct objects ('inverse'); 0 for unknown labels."""
    if direction not in ("forward", "inverse"):
        raise ValueError(f"direction must be 'forward' or 'inverse': {direction!r}")
    return CardinalityModel(stats).fanout(Symbol(label, inverse=direction == "inverse"))


def _simulate_wavefront(
    auto: Automaton, model: CardinalityModel, bound: bool
) -> tuple[list[float], dict[int, float], bool]:
    """Expected new tuples per round plus cumulative per-state counts."""
    n = model.node_count
    seed = model.seed_estimate(auto.symbols_from(auto.start), bound)
    cap = seed * n
    cum = {q: 0.0 for q in range(auto.state_count)}
    cum[auto.start] = seed
    rounds: list[float] = [seed] if seed > 0 else []
    cur: dict[int, float] = {auto.start: seed}
    saturated = False

    for _ in range(n):
        raw: dict[int, float] = {}
        for q, amount in cur.items():
            if amount <= 0.0:
                continue
            if cum[q] >= cap:
                saturated = True
                continue
            for sym, nxt in auto.outgoing.get(q, ()):
                raw[nxt] = raw.get(nxt, 0.0) + amount * model.fanout(sym)
        produced: dict[int, float] = {}
        for q, amount in raw.items():
            allowed = min(amount, cap - cum[q])
            if allowed < amount:
                saturated = True
            if allowed > 0.0:
                produced[q] = allowed
        if not produced or max(produced.values()) < _STOP_THRESHOLD:
            break
        for q, amount in produced.items():
            cum[q] += amount
        rounds.append(sum(produced.values()))
        cur = produced

    return rounds, cum, saturated


def _result_size(
    auto: Automaton, cum: dict[int, float], model: CardinalityModel
) -> float:
    """Estimated result pairs read off final states, capped by the pair space."""
    n = model.node_count
    size = sum(cum[q] for q in auto.finals)
    if auto.nullable:
        size += n
    return min(size, float(n * n))


def _estimate(
    plan: WavePlan, stats: LabelStats, source_bound: bool, target_bound: bool
) -> tuple[list[float], float, bool]:
    """Returns (per-round charges, estimated result size, saturated flag)."""
    n = stats.node_count
    rounds: list[float] = []
    saturated = False
    view_sizes: dict[int, float] = {}
    for v in plan.views:
        nested_rounds, nested_size, nested_sat = _estimate(
            v.nested_plan, stats, False, False
        )
        size = min(nested_size, float(n * n))
        if size < nested_size:
            saturated = True
        rounds.extend(nested_rounds)
        rounds.append(size)
        saturated = saturated or nested_sat
        view_sizes[v.view_id] = size
    model = CardinalityModel(stats, view_sizes)

    if plan.kind == FORWARD:
        wf_rounds, cum, sat = _simulate_wavefront(plan.left_automaton, model, source_bound)
        rounds.extend(wf_rounds)
        return rounds, _result_size(plan.left_automaton, cum, model), saturated or sat
    if plan.kind == BACKWARD:
        wf_rounds, cum, sat = _simulate_wavefront(
            plan.right_automaton, model, target_bound
        )
        rounds.extend(wf_rounds)
        return rounds, _result_size(plan.right_automaton, cum, model), saturated or sat
    if plan.kind == BIDIRECTIONAL:
        lrounds, lcum, lsat = _simulate_wavefront(plan.left_automaton, model, source_bound)
        rrounds, rcum, rsat = _simulate_wavefront(
            plan.right_automaton, model, target_bound
        )
        rounds.extend(lrounds)
        rounds.extend(rrounds)
        left_finals = sum(lcum[q] for q in plan.left_automaton.finals)
        right_finals = sum(rcum[q] for q in plan.right_automaton.finals)
        join = left_finals * right_finals / n if n else 0.0
        join = min(join, float(n * n))
        rounds.append(join)
        result = join
        if plan.left_automaton.nullable and plan.right_automaton.nullable:
            result = min(join + n, float(n * n))
        return rounds, result, saturated or lsat or rsat
    raise ValueError(f"unknown plan kind: {plan.kind}")


def estimate_plan_cost(
    p: WavePlan, stats: LabelStats, bindings=None
) -> CostEstimate:
    """Expected total search tuples for one plan under the uniform fan-out
    model; per_iteration lists charges in the evaluator's execution order
    (view rounds, view size, wavefront rounds, join estimate)."""
    source_bound = bindings is not None and bindings.source is not None
    target_bound = bindings is not None and bindings.target is not None
    rounds, _, saturated = _estimate(p, stats, source_bound, target_bound)
    return CostEstimate(
        est_total_tuples=float(sum(rounds)),
        per_iteration=tuple(rounds),
        saturated=saturated,
    )


def choose_best_plan(
    plans: list[WavePlan], stats: LabelStats, bindings=None
) -> tuple[WavePlan, CostEstimate]:
    """Minimum estimated cost; ties broken by lexicographically least
    plan signature, so selection is fully deterministic."""
    if not plans:
        raise ValueError("no plans to choose from")
    estimates = [(estimate_plan_cost(p, stats, bindings), p) for p in plans]
    best_est, best = min(
        estimates, key=lambda pair: (pair[0].est_total_tuples, plan_signature(pair[1]))
    )
    return best, best_est
