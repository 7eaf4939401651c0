"""Property-path expressions: AST, parser, inverse normalization, printing.

Grammar (whitespace insignificant):

    expr    := seq ('|' seq)*
    seq     := unary ('/' unary)*
    unary   := '^' unary | postfix
    postfix := primary ('*' | '+' | '?')?
    primary := '<' iri '>' | '(' expr ')'

'/' binds tighter than '|'; a postfix modifier binds to the preceding
primary; '^' applies to the modified element, so `^<a>*` parses as
Inverse(ZeroOrMore(a)).  Negated property sets (`!`) are rejected with a
dedicated error.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union


@dataclass(frozen=True)
class Label:
    iri: str


@dataclass(frozen=True)
class Inverse:
    inner: "PathExpr"


@dataclass(frozen=True)
class Seq:
    left: "PathExpr"
    right: "PathExpr"


@dataclass(frozen=True)
class Alt:
    left: "PathExpr"
    right: "PathExpr"


@dataclass(frozen=True)
class ZeroOrMore:
    inner: "PathExpr"


@dataclass(frozen=True)
class OneOrMore:
    inner: "PathExpr"


@dataclass(frozen=True)
class ZeroOrOne:
    inner: "PathExpr"


PathExpr = Union[Label, Inverse, Seq, Alt, ZeroOrMore, OneOrMore, ZeroOrOne]


class PathSyntaxError(ValueError):
    """Syntax error in a path expression; carries the byte offset."""

    def __init__(self, offset: int, message: str):
        super().__init__(f"offset {offset}: {message}")
        self.offset = offset


class UnsupportedFeatureError(PathSyntaxError):
    """Syntactically recognizable feature outside the supported subset."""


_MODIFIERS = {"*": ZeroOrMore, "+": OneOrMore, "?": ZeroOrOne}


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    """Tokens as (kind, value, offset); kind is 'iri' or the punctuation."""
    tokens = []
    i = 0
    n = len(text)
    while i < n:
        c = text[i]
        if c.isspace():
            i += 1
            continue
        if c == "<":
            end = text.find(">", i + 1)
            if end < 0:
                raise PathSyntaxError(i, "unterminated IRI")
            tokens.append(("iri", text[i + 1 : end], i))
            i = end + 1
        elif c == "!":
            raise UnsupportedFeatureError(i, "negated property sets are not supported")
        elif c in "()^/|*+?":
            tokens.append((c, c, i))
            i += 1
        else:
            raise PathSyntaxError(i, f"unexpected character {c!r}")
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = _tokenize(text)
        self.pos = 0

    def peek(self) -> str | None:
        return self.tokens[self.pos][0] if self.pos < len(self.tokens) else None

    def next(self) -> tuple[str, str, int]:
        if self.pos >= len(self.tokens):
            raise PathSyntaxError(len(self.text), "unexpected end of expression")
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def offset(self) -> int:
        if self.pos < len(self.tokens):
            return self.tokens[self.pos][2]
        return len(self.text)

    def expr(self) -> PathExpr:
        node = self.seq()
        while self.peek() == "|":
            self.next()
            node = Alt(node, self.seq())
        return node

    def seq(self) -> PathExpr:
        node = self.unary()
        while self.peek() == "/":
            self.next()
            node = Seq(node, self.unary())
        return node

    def unary(self) -> PathExpr:
        if self.peek() == "^":
            self.next()
            return Inverse(self.unary())
        return self.postfix()

    def postfix(self) -> PathExpr:
        node = self.primary()
        kind = self.peek()
        if kind in _MODIFIERS:
            self.next()
            node = _MODIFIERS[kind](node)
            if self.peek() in _MODIFIERS:
                raise PathSyntaxError(
                    self.offset(), "stacked modifiers require parentheses"
                )
        return node

    def primary(self) -> PathExpr:
        kind, value, offset = self.next()
        if kind == "iri":
            return Label(value)
        if kind == "(":
            node = self.expr()
            kind2, _, _ = self.next()
            if kind2 != ")":
                raise PathSyntaxError(self.offset(), "expected ')'")
            return node
        raise PathSyntaxError(offset, f"expected IRI or '(', got {value!r}")


def parse_path(text: str) -> PathExpr:
    """Parse a property-path expression; raises PathSyntaxError with offset."""
    parser = _Parser(text)
    if not parser.tokens:
        raise PathSyntaxError(0, "empty expression")
    node = parser.expr()
    if parser.pos != len(parser.tokens):
        raise PathSyntaxError(parser.offset(), "trailing input")
    return node


def normalize_inverses(e: PathExpr) -> PathExpr:
    """Language-equivalent expression with Inverse only directly above Label.

    Uses ^(p/q)=^q/^p, ^(p|q)=^p|^q, ^(p*)=(^p)*, ^(p+)=(^p)+, ^(p?)=(^p)?,
    ^^p=p.  Idempotent.
    """
    return _normalize(e, inverted=False)


def _normalize(e: PathExpr, inverted: bool) -> PathExpr:
    if isinstance(e, Label):
        return Inverse(e) if inverted else e
    if isinstance(e, Inverse):
        return _normalize(e.inner, not inverted)
    if isinstance(e, Seq):
        if inverted:
            return Seq(_normalize(e.right, True), _normalize(e.left, True))
        return Seq(_normalize(e.left, False), _normalize(e.right, False))
    if isinstance(e, Alt):
        return Alt(_normalize(e.left, inverted), _normalize(e.right, inverted))
    if isinstance(e, (ZeroOrMore, OneOrMore, ZeroOrOne)):
        return type(e)(_normalize(e.inner, inverted))
    raise TypeError(f"not a PathExpr: {e!r}")


def expr_to_string(e: PathExpr) -> str:
    """Fully parenthesized form that parses back to the same structure."""
    if isinstance(e, Label):
        return f"<{e.iri}>"
    if isinstance(e, Inverse):
        return f"(^{expr_to_string(e.inner)})"
    if isinstance(e, Seq):
        return f"({expr_to_string(e.left)}/{expr_to_string(e.right)})"
    if isinstance(e, Alt):
        return f"({expr_to_string(e.left)}|{expr_to_string(e.right)})"
    if isinstance(e, ZeroOrMore):
        return f"({expr_to_string(e.inner)}*)"
    if isinstance(e, OneOrMore):
        return f"({expr_to_string(e.inner)}+)"
    if isinstance(e, ZeroOrOne):
        return f"({expr_to_string(e.inner)}?)"
    raise TypeError(f"not a PathExpr: {e!r}")
