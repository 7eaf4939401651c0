"""Plan construction: automata and the space of evaluation strategies.

A path expression compiles (Glushkov position construction, one state per
label occurrence plus a start state, no epsilon transitions) to an
automaton whose symbols pair a predicate token with a traversal direction.
From one expression the planner enumerates every strategy the evaluator
can execute:

* Forward        -- one wavefront expanding from the source side;
* Backward       -- one wavefront over the reversed automaton, expanding
                    from the target side;
* Bidirectional  -- two wavefronts meeting in the middle, one per side of
                    a top-level sequence split;
* view variants  -- any of the above with one Kleene sub-expression's body
                    pre-materialized as a pair relation and traversed as a
                    virtual edge label.

Plans carry a canonical signature (`F`, `B`, `B<split>`, with `V<pos>`
appended for view variants) that is unique within one enumeration.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property, reduce
from typing import Iterator, Optional

from .graph import LabelStats
from .pathparser import (
    Alt,
    Inverse,
    Label,
    OneOrMore,
    PathExpr,
    Seq,
    ZeroOrMore,
    ZeroOrOne,
    normalize_inverses,
)

FORWARD = "forward"
BACKWARD = "backward"
BIDIRECTIONAL = "bidirectional"


@dataclass(frozen=True)
class ViewRef:
    """Leaf standing for a materialized pair relation (planner-internal)."""

    view_id: int


@dataclass(frozen=True)
class Symbol:
    """Automaton transition symbol: a predicate or view token plus direction."""

    label: str
    inverse: bool = False
    view_id: int | None = None

    @property
    def display(self) -> str:
        return ("^" if self.inverse else "") + self.label

    def flipped(self) -> "Symbol":
        return Symbol(self.label, not self.inverse, self.view_id)


Transition = tuple[int, Symbol, int]


def _transition_key(t: Transition) -> tuple[int, str, int]:
    return (t[0], t[1].display, t[2])


@dataclass(frozen=True)
class Automaton:
    """Epsilon-free NFA; states are dense ints, start is always 0."""

    start: int
    state_count: int
    finals: frozenset[int]
    transitions: tuple[Transition, ...]

    @property
    def nullable(self) -> bool:
        return self.start in self.finals

    @cached_property
    def outgoing(self) -> dict[int, tuple[tuple[Symbol, int], ...]]:
        out: dict[int, list[tuple[Symbol, int]]] = {}
        for src, sym, dst in self.transitions:
            out.setdefault(src, []).append((sym, dst))
        return {
            q: tuple(sorted(pairs, key=lambda p: (p[0].display, p[1])))
            for q, pairs in out.items()
        }

    def symbols_from(self, state: int) -> tuple[Symbol, ...]:
        seen: dict[str, Symbol] = {}
        for sym, _ in self.outgoing.get(state, ()):
            seen.setdefault(sym.display, sym)
        return tuple(seen[k] for k in sorted(seen))


@dataclass(frozen=True)
class ViewDef:
    """Cached loop body: sub_expr is materialized unbound and consumed as a
    virtual edge label by the surrounding automaton."""

    view_id: int
    position: int
    sub_expr: PathExpr
    nested_plan: "WavePlan"


@dataclass(frozen=True)
class WavePlan:
    kind: str
    left_automaton: Optional[Automaton] = None
    right_automaton: Optional[Automaton] = None
    split: Optional[int] = None
    views: tuple[ViewDef, ...] = ()
    plan_id: str = ""


def _leaf_symbol(e: PathExpr | ViewRef, inverse: bool) -> Symbol:
    if isinstance(e, Label):
        return Symbol(f"<{e.iri}>", inverse)
    if isinstance(e, ViewRef):
        return Symbol(f"$view{e.view_id}", inverse, e.view_id)
    raise ValueError(
        "expression is not normalized: Inverse above a non-leaf "
        "(call normalize_inverses first)"
    )


def compile_automaton(e: PathExpr) -> Automaton:
    """Glushkov construction; state count is exactly leaf count + 1.

    Expects Inverse only directly above leaves; un-normalized plain
    expressions are normalized on the way in.
    """
    if not _is_normalized(e):
        e = normalize_inverses(e)

    symbols: list[Symbol] = []
    follow: list[set[int]] = []

    def leaf(sym: Symbol) -> tuple[bool, set[int], set[int]]:
        symbols.append(sym)
        follow.append(set())
        pos = len(symbols)
        return (False, {pos}, {pos})

    def walk(node: PathExpr | ViewRef) -> tuple[bool, set[int], set[int]]:
        if isinstance(node, (Label, ViewRef)):
            return leaf(_leaf_symbol(node, inverse=False))
        if isinstance(node, Inverse):
            return leaf(_leaf_symbol(node.inner, inverse=True))
        if isinstance(node, Seq):
            ln, lf, ll = walk(node.left)
            rn, rf, rl = walk(node.right)
            for p in ll:
                follow[p - 1] |= rf
            first = (lf | rf) if ln else lf
            last = (rl | ll) if rn else rl
            return (ln and rn, first, last)
        if isinstance(node, Alt):
            ln, lf, ll = walk(node.left)
            rn, rf, rl = walk(node.right)
            return (ln or rn, lf | rf, ll | rl)
        if isinstance(node, (ZeroOrMore, OneOrMore)):
            n, f, l = walk(node.inner)
            for p in l:
                follow[p - 1] |= f
            return (n or isinstance(node, ZeroOrMore), f, l)
        if isinstance(node, ZeroOrOne):
            n, f, l = walk(node.inner)
            return (True, f, l)
        raise TypeError(f"not a PathExpr: {node!r}")

    nullable, first, last = walk(e)
    transitions = [(0, symbols[p - 1], p) for p in first]
    for p, successors in enumerate(follow, start=1):
        transitions.extend((p, symbols[q - 1], q) for q in successors)
    finals = set(last) | ({0} if nullable else set())
    return Automaton(
        start=0,
        state_count=len(symbols) + 1,
        finals=frozenset(finals),
        transitions=tuple(sorted(transitions, key=_transition_key)),
    )


def _is_normalized(e: PathExpr | ViewRef) -> bool:
    if isinstance(e, (Label, ViewRef)):
        return True
    if isinstance(e, Inverse):
        return isinstance(e.inner, (Label, ViewRef))
    if isinstance(e, (Seq, Alt)):
        return _is_normalized(e.left) and _is_normalized(e.right)
    return _is_normalized(e.inner)


def reverse_automaton(a: Automaton) -> Automaton:
    """Automaton of the reversed language with every direction flipped.

    Transition reversal plus a synthetic start that copies the transitions
    leaving each original final (subset-free, stays epsilon-free); the
    result is trimmed to reachable and co-reachable states.
    """
    transitions: set[Transition] = set()
    for src, sym, dst in a.transitions:
        transitions.add((dst + 1, sym.flipped(), src + 1))
    for f in a.finals:
        for src, sym, dst in a.transitions:
            if dst == f:
                transitions.add((0, sym.flipped(), src + 1))
    finals = {a.start + 1} | ({0} if a.nullable else set())
    return _trim(0, finals, transitions)


def _trim(start: int, finals: set[int], transitions: set[Transition]) -> Automaton:
    fwd: dict[int, set[int]] = {}
    bwd: dict[int, set[int]] = {}
    for src, _, dst in transitions:
        fwd.setdefault(src, set()).add(dst)
        bwd.setdefault(dst, set()).add(src)

    def closure(seeds: set[int], adj: dict[int, set[int]]) -> set[int]:
        seen = set(seeds)
        stack = list(seeds)
        while stack:
            for nxt in adj.get(stack.pop(), ()):
                if nxt not in seen:
                    seen.add(nxt)
                    stack.append(nxt)
        return seen

    reachable = closure({start}, fwd)
    coreachable = closure(set(finals), bwd)
    keep = (reachable & coreachable) | {start}
    renumber = {old: new for new, old in enumerate(sorted(keep))}
    kept = [
        (renumber[s], sym, renumber[d])
        for s, sym, d in transitions
        if s in keep and d in keep
    ]
    return Automaton(
        start=renumber[start],
        state_count=len(keep),
        finals=frozenset(renumber[f] for f in finals if f in keep),
        transitions=tuple(sorted(kept, key=_transition_key)),
    )


# -- expression surgery -------------------------------------------------------


def _seq_factors(e: PathExpr) -> list[PathExpr]:
    if isinstance(e, Seq):
        return _seq_factors(e.left) + _seq_factors(e.right)
    return [e]


def _seq_of(factors: list[PathExpr]) -> PathExpr:
    return reduce(lambda l, r: Seq(l, r), factors)


def _kleene_subtrees(e: PathExpr) -> list[tuple[int, ZeroOrMore | OneOrMore]]:
    """(preorder index, node) for every ZeroOrMore/OneOrMore in the tree."""
    found: list[tuple[int, ZeroOrMore | OneOrMore]] = []
    counter = itertools.count()

    def walk(node: PathExpr) -> None:
        idx = next(counter)
        if isinstance(node, (ZeroOrMore, OneOrMore)):
            found.append((idx, node))
        if isinstance(node, (Seq, Alt)):
            walk(node.left)
            walk(node.right)
        elif isinstance(node, (Inverse, ZeroOrMore, OneOrMore, ZeroOrOne)):
            walk(node.inner)

    walk(e)
    return found


def _replace_kleene(e: PathExpr, position: int, view_id: int) -> PathExpr:
    """Swap the Kleene node at the given preorder index for the same
    operator applied to a view leaf."""
    counter = itertools.count()

    def walk(node: PathExpr) -> PathExpr:
        idx = next(counter)
        if idx == position:
            assert isinstance(node, (ZeroOrMore, OneOrMore))
            return type(node)(ViewRef(view_id))
        if isinstance(node, (Seq, Alt)):
            return type(node)(walk(node.left), walk(node.right))
        if isinstance(node, (Inverse, ZeroOrMore, OneOrMore, ZeroOrOne)):
            return type(node)(walk(node.inner))
        return node

    return walk(e)


# -- plan enumeration ---------------------------------------------------------


def plan_signature(p: WavePlan) -> str:
    """Canonical plan identity: kind, split index, view subtree positions."""
    if p.kind == FORWARD:
        base = "F"
    elif p.kind == BACKWARD:
        base = "B"
    else:
        base = f"B{p.split}"
    return base + "".join(f"V{v.position}" for v in p.views)


def _base_plans(
    expr: PathExpr, views: tuple[ViewDef, ...], suffix: str
) -> Iterator[WavePlan]:
    auto = compile_automaton(expr)
    yield WavePlan(FORWARD, left_automaton=auto, views=views, plan_id="F" + suffix)
    yield WavePlan(
        BACKWARD,
        right_automaton=reverse_automaton(auto),
        views=views,
        plan_id="B" + suffix,
    )
    factors = _seq_factors(expr)
    for i in range(1, len(factors)):
        left = compile_automaton(_seq_of(factors[:i]))
        right = reverse_automaton(compile_automaton(_seq_of(factors[i:])))
        yield WavePlan(
            BIDIRECTIONAL,
            left_automaton=left,
            right_automaton=right,
            split=i,
            views=views,
            plan_id=f"B{i}" + suffix,
        )


def enumerate_plans(e: PathExpr, stats: LabelStats, bindings=None) -> list[WavePlan]:
    """All evaluation strategies for an expression, in deterministic order.

    Always: Forward, Backward, one Bidirectional per top-level sequence
    split; then per Kleene subtree a view variant of each, replacing that
    one subtree (never subsets).  All kinds are enumerated regardless of
    bound endpoints; seeding preference is the cost model's job.  Nested
    view plans are chosen by estimated cost, unbound, since views are
    materialized over the whole graph.
    """
    e = normalize_inverses(e)
    plans = list(_base_plans(e, views=(), suffix=""))
    for position, node in _kleene_subtrees(e):
        nested = _choose_nested(node.inner, stats)
        view = ViewDef(
            view_id=0, position=position, sub_expr=node.inner, nested_plan=nested
        )
        rewritten = _replace_kleene(e, position, view.view_id)
        plans.extend(_base_plans(rewritten, views=(view,), suffix=f"V{position}"))
    return plans


def _choose_nested(body: PathExpr, stats: LabelStats) -> WavePlan:
    # Deferred import: costmodel imports planner types at module load.
    from .costmodel import choose_best_plan

    plan, _ = choose_best_plan(enumerate_plans(body, stats), stats, None)
    return plan


# -- DOT rendering ------------------------------------------------------------


def _dot_escape(text: str) -> str:
    return text.replace("\\", "\\\\").replace('"', '\\"')


def _emit_automaton(
    auto: Automaton, title: str, prefix: str, indent: str, lines: list[str]
) -> None:
    lines.append(f"{indent}subgraph cluster_{prefix} {{")
    lines.append(f'{indent}  label="{_dot_escape(title)}";')
    for q in range(auto.state_count):
        shape = "doublecircle" if q in auto.finals else "circle"
        style = ' style=bold' if q == auto.start else ""
        lines.append(f'{indent}  {prefix}_s{q} [shape={shape}{style} label="{q}"];')
    for src, sym, dst in auto.transitions:
        direction = "inverse" if sym.inverse else "forward"
        label = _dot_escape(f"{sym.label}/{direction}")
        lines.append(f'{indent}  {prefix}_s{src} -> {prefix}_s{dst} [label="{label}"];')
    lines.append(f"{indent}}}")


def _emit_plan(p: WavePlan, prefix: str, indent: str, lines: list[str]) -> None:
    wavefronts = []
    if p.left_automaton is not None:
        wavefronts.append(("forward wavefront", p.left_automaton))
    if p.right_automaton is not None:
        wavefronts.append(("backward wavefront", p.right_automaton))
    for i, (title, auto) in enumerate(wavefronts):
        _emit_automaton(auto, title, f"{prefix}w{i}", indent, lines)
    for v in p.views:
        lines.append(f"{indent}subgraph cluster_{prefix}view{v.view_id} {{")
        lines.append(
            f'{indent}  label="$view{v.view_id}: plan {v.nested_plan.plan_id}";'
        )
        _emit_plan(v.nested_plan, f"{prefix}v{v.view_id}_", indent + "  ", lines)
        lines.append(f"{indent}}}")


def plan_to_dot(p: WavePlan) -> str:
    """DOT digraph: one cluster per wavefront, views as nested subgraphs."""
    lines = [
        "digraph plan {",
        "  rankdir=LR;",
        f'  label="plan {_dot_escape(p.plan_id)}";',
    ]
    _emit_plan(p, "", "  ", lines)
    lines.append("}")
    return "\n".join(lines) + "\n"
