"""Dictionary-encoded, label-indexed directed multigraph over RDF triples.

Terms (IRIs and literals) are interned to dense integer ids in first-seen
order.  Triples are stored once (set semantics) and indexed both ways:
(predicate, subject) -> objects and (predicate, object) -> subjects, with
neighbor sets kept as sorted tuples so iteration order is deterministic.
A Graph is immutable after load and safe for concurrent readers.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable

TermId = int

# <subj> <pred> <obj> .   where obj is an IRI or a quoted literal whose
# full token (including any @lang / ^^<dt> suffix) is kept as term text.
_IRI = r'<[^<>"\s]*>'
_LITERAL = r'"(?:[^"\\]|\\.)*"\S*'
_TRIPLE_RE = re.compile(rf"^({_IRI})\s+({_IRI})\s+({_IRI}|{_LITERAL})\s*\.$")


class NTriplesError(ValueError):
    """Malformed N-Triples input; carries the 1-based line number."""

    def __init__(self, line_no: int, message: str):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


@dataclass(frozen=True)
class LabelCounts:
    count: int
    distinct_subjects: int
    distinct_objects: int


@dataclass(frozen=True)
class LabelStats:
    """Exact per-predicate statistics; labels keyed by predicate term text."""

    node_count: int
    labels: dict[str, LabelCounts]

    def counts(self, label: str) -> LabelCounts | None:
        return self.labels.get(label)


class Graph:
    """Immutable triple store; build instances with :func:`load_ntriples`."""

    def __init__(
        self,
        id_to_term: list[str],
        triples: set[tuple[TermId, TermId, TermId]],
    ):
        self._id_to_term = id_to_term
        self._term_to_id = {t: i for i, t in enumerate(id_to_term)}
        self._triples = frozenset(triples)

        forward: dict[tuple[TermId, TermId], list[TermId]] = {}
        backward: dict[tuple[TermId, TermId], list[TermId]] = {}
        subjects: dict[TermId, set[TermId]] = {}
        objects: dict[TermId, set[TermId]] = {}
        nodes: set[TermId] = set()
        for s, p, o in triples:
            forward.setdefault((p, s), []).append(o)
            backward.setdefault((p, o), []).append(s)
            subjects.setdefault(p, set()).add(s)
            objects.setdefault(p, set()).add(o)
            nodes.add(s)
            nodes.add(o)

        self._forward = {k: tuple(sorted(v)) for k, v in forward.items()}
        self._backward = {k: tuple(sorted(v)) for k, v in backward.items()}
        self._subjects = {p: tuple(sorted(v)) for p, v in subjects.items()}
        self._objects = {p: tuple(sorted(v)) for p, v in objects.items()}
        self._nodes = tuple(sorted(nodes))

    # -- dictionary ---------------------------------------------------------

    def intern(self, term_text: str) -> TermId | None:
        """Id of a known term, or None for unknown terms."""
        return self._term_to_id.get(term_text)

    def term(self, term_id: TermId) -> str:
        return self._id_to_term[term_id]

    @property
    def term_count(self) -> int:
        return len(self._id_to_term)

    # -- topology -----------------------------------------------------------

    @property
    def nodes(self) -> tuple[TermId, ...]:
        """Ids occurring in subject or object position, sorted."""
        return self._nodes

    @property
    def node_count(self) -> int:
        return len(self._nodes)

    @property
    def triple_count(self) -> int:
        return len(self._triples)

    def triples(self) -> Iterable[tuple[TermId, TermId, TermId]]:
        return sorted(self._triples)

    def predicates(self) -> tuple[TermId, ...]:
        return tuple(sorted(self._subjects))

    def out_neighbors(self, node: TermId, predicate: TermId) -> tuple[TermId, ...]:
        """All o with (node, predicate, o), sorted; empty when none."""
        return self._forward.get((predicate, node), ())

    def in_neighbors(self, node: TermId, predicate: TermId) -> tuple[TermId, ...]:
        """All s with (s, predicate, node), sorted; empty when none."""
        return self._backward.get((predicate, node), ())

    def subjects_of(self, predicate: TermId) -> tuple[TermId, ...]:
        return self._subjects.get(predicate, ())

    def objects_of(self, predicate: TermId) -> tuple[TermId, ...]:
        return self._objects.get(predicate, ())


def load_ntriples(source: str | Iterable[str]) -> Graph:
    """Parse N-Triples text (a string or an iterable of lines) into a Graph.

    Supports the subset `<s> <p> (<o> | "literal") .` plus blank lines and
    `#` comment lines.  Raises :class:`NTriplesError` with the offending
    line number otherwise.
    """
    lines = source.splitlines() if isinstance(source, str) else source
    id_to_term: list[str] = []
    term_to_id: dict[str, TermId] = {}
    triples: set[tuple[TermId, TermId, TermId]] = set()

    def intern(text: str) -> TermId:
        tid = term_to_id.get(text)
        if tid is None:
            tid = len(id_to_term)
            term_to_id[text] = tid
            id_to_term.append(text)
        return tid

    for line_no, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        m = _TRIPLE_RE.match(line)
        if m is None:
            raise NTriplesError(line_no, _diagnose(line))
        s, p, o = m.groups()
        triples.add((intern(s), intern(p), intern(o)))

    return Graph(id_to_term, triples)


def _diagnose(line: str) -> str:
    if not line.endswith("."):
        return "expected terminating '.'"
    if line.startswith('"'):
        return "subject must be an IRI"
    parts = line.split(None, 2)
    if len(parts) >= 2 and not re.fullmatch(_IRI, parts[1]):
        return "predicate must be an IRI"
    return "malformed triple"


def serialize_ntriples(g: Graph) -> str:
    """Render the triple set back to N-Triples, sorted, one per line."""
    lines = [f"{g.term(s)} {g.term(p)} {g.term(o)} ." for s, p, o in g.triples()]
    return "\n".join(lines) + ("\n" if lines else "")


def compute_stats(g: Graph) -> LabelStats:
    """Exact per-predicate counts, keyed by predicate term text."""
    labels = {
        g.term(p): LabelCounts(
            count=sum(len(g.out_neighbors(s, p)) for s in g.subjects_of(p)),
            distinct_subjects=len(g.subjects_of(p)),
            distinct_objects=len(g.objects_of(p)),
        )
        for p in g.predicates()
    }
    return LabelStats(node_count=g.node_count, labels=labels)
