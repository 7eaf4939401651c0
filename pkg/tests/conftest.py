"""Shared builders: tiny graphs from short names, seeded random instances."""

from __future__ import annotations

import random

import pytest

from rpquery.graph import Graph, load_ntriples
from rpquery.pathparser import (
    Alt,
    Inverse,
    Label,
    OneOrMore,
    PathExpr,
    Seq,
    ZeroOrMore,
    ZeroOrOne,
)


def make_graph(triples: list[tuple[str, str, str]]) -> Graph:
    """Graph from short names; `("x", "a", "y")` becomes `<x> <a> <y> .`"""
    lines = [f"<{s}> <{p}> <{o}> ." for s, p, o in triples]
    return load_ntriples("\n".join(lines))


def term(g: Graph, name: str) -> int:
    tid = g.intern(f"<{name}>")
    assert tid is not None, f"unknown term {name}"
    return tid


def random_multigraph(
    rng: random.Random,
    max_nodes: int = 30,
    max_triples: int = 90,
    labels: tuple[str, ...] = ("a", "b", "c"),
) -> tuple[Graph, list[str]]:
    """Random edge set per label; returns the graph and its node tokens."""
    n = rng.randint(1, max_nodes)
    nodes = [f"n{i}" for i in range(n)]
    chosen = labels[: rng.randint(1, len(labels))]
    triples = [
        (rng.choice(nodes), rng.choice(chosen), rng.choice(nodes))
        for _ in range(rng.randint(0, max_triples))
    ]
    return make_graph(triples), [f"<{v}>" for v in nodes]


def random_expr(
    rng: random.Random,
    depth: int,
    labels: tuple[str, ...] = ("a", "b", "c"),
    allow_kleene: bool = True,
) -> PathExpr:
    """Random AST of bounded depth covering all seven variants."""
    if depth <= 0 or rng.random() < 0.3:
        return Label(rng.choice(labels))
    variants = [Seq, Alt, Inverse, ZeroOrOne]
    if allow_kleene:
        variants += [ZeroOrMore, OneOrMore]
    ctor = rng.choice(variants)
    if ctor in (Seq, Alt):
        return ctor(
            random_expr(rng, depth - 1, labels, allow_kleene),
            random_expr(rng, depth - 1, labels, allow_kleene),
        )
    return ctor(random_expr(rng, depth - 1, labels, allow_kleene))


@pytest.fixture
def chain3() -> Graph:
    """x1 -a-> x2 -a-> x3"""
    return make_graph([("x1", "a", "x2"), ("x2", "a", "x3")])


@pytest.fixture
def cycle2() -> Graph:
    """1 -a-> 2 -a-> 1"""
    return make_graph([("n1", "a", "n2"), ("n2", "a", "n1")])
