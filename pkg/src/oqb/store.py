"""In-memory ground-triple registry with a conjunctive BGP evaluator.

The store stands in for the sensor-network service directory: a set of ground
triples loaded from an N-Triples subset, indexed by subject, predicate, and
object. `evaluate` answers SELECT queries by a left-to-right index-assisted
join; result order is deterministic (rows sorted by their serialized terms).
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import BinaryIO, Iterator

from .errors import OqbError
from .sparql import SparqlQuery, TriplePattern, term_text
from .terms import GroundTerm, Iri, Literal, RdfTerm, Variable, sort_text


class NtParseError(OqbError):
    code = "NT_PARSE"

    def __init__(self, message: str, line: int):
        self.line = line
        super().__init__(f"line {line}: {message}")


@dataclass(frozen=True, slots=True)
class GroundTriple:
    subject: Iri
    predicate: Iri
    object: GroundTerm


@dataclass(frozen=True, slots=True)
class BindingTable:
    """Solution sequence: `vars` hold no sigil, rows are parallel term tuples."""

    vars: tuple[str, ...]
    rows: tuple[tuple[GroundTerm, ...], ...]


class TripleStore:
    """Set-semantics triple store; many concurrent readers or one writer."""

    def __init__(self, triples: Iterator[GroundTriple] | None = None):
        self._triples: set[GroundTriple] = set()
        self._by_subject: dict[GroundTerm, set[GroundTriple]] = {}
        self._by_predicate: dict[GroundTerm, set[GroundTriple]] = {}
        self._by_object: dict[GroundTerm, set[GroundTriple]] = {}
        for triple in triples or ():
            self.insert(triple)

    def __len__(self) -> int:
        return len(self._triples)

    def __contains__(self, triple: GroundTriple) -> bool:
        return triple in self._triples

    def __iter__(self) -> Iterator[GroundTriple]:
        """Triples in sorted term-text order, so iteration is deterministic."""
        return iter(sorted(self._triples, key=_triple_key))

    def insert(self, triple: GroundTriple) -> None:
        if triple in self._triples:
            return
        self._triples.add(triple)
        self._by_subject.setdefault(triple.subject, set()).add(triple)
        self._by_predicate.setdefault(triple.predicate, set()).add(triple)
        self._by_object.setdefault(triple.object, set()).add(triple)

    def remove(self, triple: GroundTriple) -> None:
        if triple not in self._triples:
            return
        self._triples.discard(triple)
        for index, key in (
            (self._by_subject, triple.subject),
            (self._by_predicate, triple.predicate),
            (self._by_object, triple.object),
        ):
            bucket = index[key]
            bucket.discard(triple)
            if not bucket:
                del index[key]

    def candidates(self, pattern: tuple[GroundTerm | None, ...]) -> set[GroundTriple]:
        """Smallest index bucket consistent with the (s, p, o) constants given;
        None positions are unconstrained. Callers still match fully."""
        subject, predicate, obj = pattern
        buckets = []
        if subject is not None:
            buckets.append(self._by_subject.get(subject, set()))
        if predicate is not None:
            buckets.append(self._by_predicate.get(predicate, set()))
        if obj is not None:
            buckets.append(self._by_object.get(obj, set()))
        if not buckets:
            return self._triples
        return min(buckets, key=len)


def _triple_key(triple: GroundTriple) -> tuple[str, str, str]:
    return (sort_text(triple.subject), sort_text(triple.predicate), sort_text(triple.object))


# One N-Triples statement: IRI, IRI, then IRI or plain double-quoted literal.
_STATEMENT_RE = re.compile(
    r'<([^<>"\s]+)>\s+<([^<>"\s]+)>\s+(?:<([^<>"\s]+)>|"((?:[^"\\]|\\.)*)")\s*\.'
)

_NT_ESCAPES = {"\\": "\\", '"': '"', "n": "\n", "t": "\t", "r": "\r"}


def load_ntriples(document: bytes | str | BinaryIO) -> TripleStore:
    """Load the N-Triples subset: one statement per line, '#' comments, no
    blank nodes, no datatype or language tags. Raises :class:`NtParseError`
    with the offending 1-based line number."""
    if isinstance(document, bytes):
        text = document.decode("utf-8")
    elif isinstance(document, str):
        text = document
    else:
        text = document.read().decode("utf-8")

    store = TripleStore()
    for number, raw in enumerate(text.split("\n"), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        match = _STATEMENT_RE.fullmatch(line)
        if match is None:
            raise NtParseError("not a valid triple statement", number)
        subject_iri, predicate_iri, object_iri, object_literal = match.groups()
        try:
            subject = Iri(subject_iri)
            predicate = Iri(predicate_iri)
            obj: GroundTerm
            if object_iri is not None:
                obj = Iri(object_iri)
            else:
                obj = Literal(_unescape(object_literal, number))
        except ValueError as exc:
            raise NtParseError(str(exc), number) from exc
        store.insert(GroundTriple(subject, predicate, obj))
    return store


def _unescape(text: str, line: int) -> str:
    out: list[str] = []
    i = 0
    while i < len(text):
        ch = text[i]
        if ch == "\\":
            code = text[i + 1] if i + 1 < len(text) else ""
            if code not in _NT_ESCAPES:
                raise NtParseError(f"bad literal escape \\{code}", line)
            out.append(_NT_ESCAPES[code])
            i += 2
        else:
            out.append(ch)
            i += 1
    return "".join(out)


def evaluate(query: SparqlQuery, store: TripleStore) -> BindingTable:
    """Join the query's patterns left to right against the store.

    Returns every total assignment of the query's variables that satisfies all
    patterns, projected to the select list, deduplicated, and sorted by the
    serialized term texts of each row. The store is never mutated.
    """
    solutions: list[dict[str, GroundTerm]] = [{}]
    for pattern in query.where:
        extended: list[dict[str, GroundTerm]] = []
        for binding in solutions:
            probe = tuple(_ground_or_none(t, binding) for t in pattern.terms())
            for triple in store.candidates(probe):
                merged = _match(pattern, triple, binding)
                if merged is not None:
                    extended.append(merged)
        solutions = extended
        if not solutions:
            break

    projected = {tuple(binding[name] for name in query.select) for binding in solutions}
    rows = tuple(sorted(projected, key=lambda row: tuple(sort_text(t) for t in row)))
    return BindingTable(vars=query.select, rows=rows)


def _ground_or_none(term: RdfTerm, binding: dict[str, GroundTerm]) -> GroundTerm | None:
    if isinstance(term, Variable):
        return binding.get(term.name)
    return term


def _match(
    pattern: TriplePattern, triple: GroundTriple, binding: dict[str, GroundTerm]
) -> dict[str, GroundTerm] | None:
    merged = dict(binding)
    pairs = zip(pattern.terms(), (triple.subject, triple.predicate, triple.object))
    for pattern_term, ground_term in pairs:
        if isinstance(pattern_term, Variable):
            bound = merged.get(pattern_term.name)
            if bound is None:
                merged[pattern_term.name] = ground_term
            elif bound != ground_term:
                return None
        elif pattern_term != ground_term:
            return None
    return merged


def format_table(table: BindingTable, prefixes: dict[str, str]) -> str:
    """Tab-separated text: '?'-sigiled header row, then one line per row with
    IRIs shortened through `prefixes` and literals double-quoted."""
    lines = ["\t".join("?" + name for name in table.vars)]
    for row in table.rows:
        lines.append("\t".join(term_text(term, prefixes) for term in row))
    return "\n".join(lines) + "\n"
