"""SPARQL SELECT intermediate representation, translator, serializer, parser.

The supported language is the conjunctive SELECT/BGP subset: PREFIX
declarations, an explicit projection list, and a WHERE block of triple
patterns. Serialization is byte-deterministic so translated queries can be
golden-tested; the parser accepts exactly what the serializer emits plus
whitespace variation and a few common spellings ('$' variables, single-quoted
strings, unpunctuated final patterns).
"""

from __future__ import annotations

from dataclasses import dataclass

from . import ontology as ont
from .errors import Diagnostic, OqbError
from .graph import NodeKind, QueryGraph, validate
from .terms import LOCAL_NAME_RE, GroundTerm, Iri, Literal, RdfTerm, Variable, shorten_iri


class ValidationFailed(OqbError):
    code = "VALIDATION_FAILED"

    def __init__(self, diagnostics: list[Diagnostic]):
        self.diagnostics = list(diagnostics)
        errors = [d for d in self.diagnostics if d.is_error]
        summary = "; ".join(f"{d.code}: {d.message}" for d in errors) or "validation failed"
        super().__init__(summary)


class SparqlSyntaxError(OqbError):
    code = "SPARQL_SYNTAX"

    def __init__(self, message: str, line: int, column: int):
        self.line = line
        self.column = column
        super().__init__(f"{line}:{column}: {message}")


class UnsupportedConstruct(OqbError):
    code = "UNSUPPORTED_CONSTRUCT"

    def __init__(self, construct: str, line: int, column: int):
        self.construct = construct
        self.line = line
        self.column = column
        super().__init__(f"{line}:{column}: unsupported SPARQL construct: {construct}")


@dataclass(frozen=True, slots=True)
class TriplePattern:
    subject: RdfTerm
    predicate: RdfTerm
    object: RdfTerm

    def __post_init__(self) -> None:
        if isinstance(self.subject, Literal):
            raise ValueError("triple pattern subject cannot be a literal")
        if isinstance(self.predicate, Literal):
            raise ValueError("triple pattern predicate cannot be a literal")

    def terms(self) -> tuple[RdfTerm, RdfTerm, RdfTerm]:
        return (self.subject, self.predicate, self.object)


@dataclass(frozen=True)
class SparqlQuery:
    """IR of one SELECT query. Variable names are stored without the sigil."""

    prefixes: dict[str, str]
    select: tuple[str, ...]
    where: tuple[TriplePattern, ...]

    def __post_init__(self) -> None:
        if not self.where:
            raise ValueError("WHERE block must contain at least one pattern")
        if not self.select:
            raise ValueError("projection list must not be empty")
        bound = self.pattern_variables()
        for name in self.select:
            if name not in bound:
                raise ValueError(f"select variable ?{name} is not bound in WHERE")

    def pattern_variables(self) -> set[str]:
        return {t.name for p in self.where for t in p.terms() if isinstance(t, Variable)}


def translate(graph: QueryGraph, catalog: ont.Ontology) -> SparqlQuery:
    """Map a strictly valid graph to its query IR.

    One pattern per edge, in edge insertion order; prefix table restricted to
    namespaces a serialized term will actually use.
    """
    diagnostics = validate(graph, catalog, strict=True)
    if any(d.is_error for d in diagnostics):
        raise ValidationFailed(diagnostics)

    patterns = []
    for edge in graph.edges:
        subject = _node_term(graph, edge.from_id, catalog)
        obj = _node_term(graph, edge.to_id, catalog)
        predicate = Iri(ont.resolve(catalog, edge.predicate))
        patterns.append(TriplePattern(subject, predicate, obj))

    used: dict[str, str] = {}
    for pattern in patterns:
        for term in pattern.terms():
            if isinstance(term, Iri):
                hit = shorten_iri(term.value, catalog.namespaces)
                if hit is not None:
                    used[hit[0]] = catalog.namespaces[hit[0]]

    select = tuple(name.lstrip("?") for name in graph.selected)
    return SparqlQuery(prefixes=used, select=select, where=tuple(patterns))


def _node_term(graph: QueryGraph, node_id: int, catalog: ont.Ontology) -> RdfTerm:
    node = graph.nodes[node_id]
    if node.kind is NodeKind.VARIABLE:
        return Variable(node.payload[1:])
    if node.kind is NodeKind.CLASS_TERM:
        return Iri(ont.resolve(catalog, node.payload))
    return Literal(node.payload)


def term_text(term: RdfTerm, prefixes: dict[str, str]) -> str:
    """One term in emitted syntax: curie or <iri>, ?var, "literal"."""
    if isinstance(term, Variable):
        return "?" + term.name
    if isinstance(term, Literal):
        escaped = term.lexical.replace("\\", "\\\\").replace('"', '\\"')
        return f'"{escaped}"'
    hit = shorten_iri(term.value, prefixes)
    if hit is not None:
        prefix, local = hit
        return f"{prefix}:{local}"
    return f"<{term.value}>"


def serialize(query: SparqlQuery) -> str:
    """Byte-deterministic text form, LF line ends, trailing newline.

    Consecutive patterns sharing a subject term collapse into one subject
    group: the first line carries the subject and ends ' ;', continuations
    start at the predicate, and the last line of the group ends ' .'.
    """
    lines = [f"PREFIX {p}: <{iri}>" for p, iri in sorted(query.prefixes.items())]
    if lines:
        lines.append("")
    lines.append("SELECT " + " ".join("?" + name for name in query.select))
    lines.append("WHERE {")
    for group in _subject_groups(query.where):
        for position, pattern in enumerate(group):
            parts = [] if position else [term_text(pattern.subject, query.prefixes)]
            parts.append(term_text(pattern.predicate, query.prefixes))
            parts.append(term_text(pattern.object, query.prefixes))
            terminator = " ;" if position < len(group) - 1 else " ."
            lines.append("  " + " ".join(parts) + terminator)
    lines.append("}")
    return "\n".join(lines) + "\n"


def _subject_groups(patterns: tuple[TriplePattern, ...]) -> list[list[TriplePattern]]:
    groups: list[list[TriplePattern]] = []
    for pattern in patterns:
        if groups and groups[-1][-1].subject == pattern.subject:
            groups[-1].append(pattern)
        else:
            groups.append([pattern])
    return groups


# -- parser -------------------------------------------------------------------

_KEYWORDS = {"PREFIX", "SELECT", "WHERE"}

_UNSUPPORTED_KEYWORDS = {
    "ASK", "BASE", "BIND", "CONSTRUCT", "DESCRIBE", "DISTINCT", "EXISTS",
    "FILTER", "FROM", "GRAPH", "GROUP", "HAVING", "LIMIT", "MINUS", "OFFSET",
    "OPTIONAL", "ORDER", "REDUCED", "SERVICE", "UNION", "VALUES",
}


@dataclass(frozen=True, slots=True)
class _Token:
    kind: str  # keyword | pname | iriref | var | string | punct | word | eof
    text: str
    line: int
    column: int


def parse_sparql(text: str) -> SparqlQuery:
    """Parse the emitted subset back into a :class:`SparqlQuery`.

    Raises :class:`SparqlSyntaxError` with a 1-based line/column on malformed
    input and :class:`UnsupportedConstruct` when the text uses SPARQL features
    outside the subset (OPTIONAL, FILTER, 'a', object lists, ...).
    """
    tokens = _tokenize(text)
    parser = _Parser(tokens)
    return parser.parse_query()


def _tokenize(text: str) -> list[_Token]:
    tokens: list[_Token] = []
    i = 0
    line = 1
    col = 1

    def advance(n: int) -> None:
        nonlocal i, line, col
        for _ in range(n):
            if text[i] == "\n":
                line += 1
                col = 1
            else:
                col += 1
            i += 1

    while i < len(text):
        ch = text[i]
        if ch in " \t\r\n":
            advance(1)
            continue
        start_line, start_col = line, col
        if ch in "{};.":
            tokens.append(_Token("punct", ch, start_line, start_col))
            advance(1)
            continue
        if ch in ",*":
            raise UnsupportedConstruct(ch, start_line, start_col)
        if ch == "<":
            end = text.find(">", i + 1)
            if end == -1:
                raise SparqlSyntaxError("unterminated IRI reference", start_line, start_col)
            value = text[i + 1:end]
            if any(c in " \t\r\n<>" for c in value):
                raise SparqlSyntaxError("whitespace inside IRI reference", start_line, start_col)
            tokens.append(_Token("iriref", value, start_line, start_col))
            advance(end - i + 1)
            continue
        if ch in "?$":
            j = i + 1
            while j < len(text) and (text[j].isalnum() or text[j] == "_"):
                j += 1
            name = text[i + 1:j]
            if not name or name[0].isdigit():
                raise SparqlSyntaxError("invalid variable name", start_line, start_col)
            tokens.append(_Token("var", name, start_line, start_col))
            advance(j - i)
            continue
        if ch in "\"'":
            lexical, consumed = _scan_string(text, i, start_line, start_col)
            tokens.append(_Token("string", lexical, start_line, start_col))
            advance(consumed)
            continue
        if ch.isalpha() or ch == "_" or ch == ":":
            j = i
            while j < len(text) and (text[j].isalnum() or text[j] in "_-.:"):
                j += 1
            # a trailing '.' is the statement terminator, not part of the name
            while j > i and text[j - 1] == ".":
                j -= 1
            word = text[i:j]
            upper = word.upper()
            if upper in _UNSUPPORTED_KEYWORDS:
                raise UnsupportedConstruct(upper, start_line, start_col)
            if word == "a":
                raise UnsupportedConstruct("a", start_line, start_col)
            if upper in _KEYWORDS and ":" not in word:
                tokens.append(_Token("keyword", upper, start_line, start_col))
            elif ":" in word:
                tokens.append(_Token("pname", word, start_line, start_col))
            else:
                tokens.append(_Token("word", word, start_line, start_col))
            advance(j - i)
            continue
        raise SparqlSyntaxError(f"unexpected character {ch!r}", start_line, start_col)
    tokens.append(_Token("eof", "", line, col))
    return tokens


def _scan_string(text: str, start: int, line: int, col: int) -> tuple[str, int]:
    quote = text[start]
    out: list[str] = []
    i = start + 1
    escapes = {"\\": "\\", '"': '"', "'": "'", "n": "\n", "t": "\t", "r": "\r"}
    while i < len(text):
        ch = text[i]
        if ch == "\\":
            if i + 1 >= len(text) or text[i + 1] not in escapes:
                raise SparqlSyntaxError("bad string escape", line, col)
            out.append(escapes[text[i + 1]])
            i += 2
            continue
        if ch == quote:
            return "".join(out), i - start + 1
        out.append(ch)
        i += 1
    raise SparqlSyntaxError("unterminated string literal", line, col)


class _Parser:
    def __init__(self, tokens: list[_Token]):
        self.tokens = tokens
        self.pos = 0

    def peek(self) -> _Token:
        return self.tokens[self.pos]

    def take(self) -> _Token:
        token = self.tokens[self.pos]
        if token.kind != "eof":
            self.pos += 1
        return token

    def fail(self, message: str, token: _Token) -> SparqlSyntaxError:
        return SparqlSyntaxError(message, token.line, token.column)

    def parse_query(self) -> SparqlQuery:
        prefixes = self.parse_prologue()
        select_vars = self.parse_select()
        where = self.parse_where(prefixes)
        tail = self.peek()
        if tail.kind != "eof":
            raise self.fail(f"unexpected trailing input {tail.text!r}", tail)

        bound = {t.name for p in where for t in p.terms() if isinstance(t, Variable)}
        for name, token in select_vars:
            if name not in bound:
                raise self.fail(f"select variable ?{name} is not bound in WHERE", token)
        return SparqlQuery(
            prefixes=prefixes,
            select=tuple(name for name, _ in select_vars),
            where=tuple(where),
        )

    def parse_prologue(self) -> dict[str, str]:
        prefixes: dict[str, str] = {}
        while self.peek().kind == "keyword" and self.peek().text == "PREFIX":
            self.take()
            name = self.take()
            if name.kind != "pname" or not name.text.endswith(":"):
                raise self.fail("expected a prefix name ending in ':'", name)
            iri = self.take()
            if iri.kind != "iriref":
                raise self.fail("expected an <iri> after the prefix name", iri)
            prefixes[name.text[:-1]] = iri.text
        return prefixes

    def parse_select(self) -> list[tuple[str, _Token]]:
        head = self.take()
        if head.kind != "keyword" or head.text != "SELECT":
            raise self.fail("expected SELECT", head)
        names: list[tuple[str, _Token]] = []
        while self.peek().kind == "var":
            token = self.take()
            names.append((token.text, token))
        if not names:
            raise self.fail("SELECT needs at least one variable", self.peek())
        return names

    def parse_where(self, prefixes: dict[str, str]) -> list[TriplePattern]:
        token = self.take()
        if token.kind == "keyword" and token.text == "WHERE":
            token = self.take()
        if not (token.kind == "punct" and token.text == "{"):
            raise self.fail("expected '{' opening the WHERE block", token)

        patterns: list[TriplePattern] = []
        while True:
            token = self.peek()
            if token.kind == "punct" and token.text == "}":
                self.take()
                break
            if token.kind == "eof":
                raise self.fail("unterminated WHERE block", token)
            patterns.extend(self.parse_subject_group(prefixes))
        if not patterns:
            raise self.fail("WHERE block must contain at least one pattern", token)
        return patterns

    def parse_subject_group(self, prefixes: dict[str, str]) -> list[TriplePattern]:
        subject_token = self.peek()
        subject = self.parse_term(prefixes)
        if isinstance(subject, Literal):
            raise self.fail("a literal cannot be a pattern subject", subject_token)

        patterns: list[TriplePattern] = []
        while True:
            predicate_token = self.peek()
            predicate = self.parse_term(prefixes)
            if isinstance(predicate, Literal):
                raise self.fail("a literal cannot be a predicate", predicate_token)
            obj = self.parse_term(prefixes)
            patterns.append(TriplePattern(subject, predicate, obj))

            token = self.peek()
            if token.kind == "punct" and token.text == ";":
                self.take()
                # allow a trailing ';' before '.' or '}'
                nxt = self.peek()
                if nxt.kind == "punct" and nxt.text == ".":
                    self.take()
                    return patterns
                if nxt.kind == "punct" and nxt.text == "}":
                    return patterns
                continue
            if token.kind == "punct" and token.text == ".":
                self.take()
                return patterns
            if token.kind == "punct" and token.text == "}":
                # W3C sample style: final pattern without terminating '.'
                return patterns
            raise self.fail("expected '.', ';', or '}' after a pattern", token)

    def parse_term(self, prefixes: dict[str, str]) -> RdfTerm:
        token = self.take()
        if token.kind == "var":
            return Variable(token.text)
        if token.kind == "iriref":
            try:
                return Iri(token.text)
            except ValueError as exc:
                raise self.fail(str(exc), token) from exc
        if token.kind == "string":
            return Literal(token.text)
        if token.kind == "pname":
            prefix, _, local = token.text.partition(":")
            if prefix not in prefixes:
                raise self.fail(f"undeclared prefix {prefix!r}", token)
            try:
                return Iri(prefixes[prefix] + local)
            except ValueError as exc:
                raise self.fail(str(exc), token) from exc
        raise self.fail(f"expected an RDF term, found {token.text!r}", token)
