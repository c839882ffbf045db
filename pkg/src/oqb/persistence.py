"""Query-document persistence: the NL question, the graph, and its SPARQL.

The canonical `.oqb` format is a line-oriented UTF-8 text document with a
version header, chosen over binary for diff-ability:

    oqb-query v1
    question: Find the Image from the Camera Sensor
    ontology: sensor.owl
    node_cap: 12
    node: 1 variable ?x
    node: 2 variable ?image
    edge: 1 2 tp:hasCameraResource
    select: ?image
    sparql: PREFIX tp: <http://topps.example.org/sensor#>
    sparql:
    sparql: SELECT ?image
    ...

Values escape backslash, LF, and CR so every field stays on one line. The
stored SPARQL is advisory on load: the ontology may have changed since save,
so consumers re-derive and compare (see :func:`check_stored_sparql`).
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import BinaryIO

from . import ontology as ont
from .errors import Diagnostic, OqbError, Severity
from .graph import NodeKind, QueryGraph
from .sparql import ValidationFailed, serialize, translate

FORMAT_VERSION = "1"

_HEADER_RE = re.compile(r"oqb-query v(\d+)\Z")
_LINE_RE = re.compile(r"(question|ontology|node_cap|node|edge|select|sparql):(?: (.*))?\Z")
_NODE_RE = re.compile(r"(\d+) (variable|class|literal)(?: (.*))?\Z")
_EDGE_RE = re.compile(r"(\d+) (\d+) (\S+)\Z")


class FormatError(OqbError):
    code = "FORMAT_ERROR"


class VersionUnsupported(OqbError):
    code = "VERSION_UNSUPPORTED"

    def __init__(self, version: str):
        self.version = version
        super().__init__(f"unsupported document version {version!r}")


class IoFailure(OqbError):
    code = "IO_FAILURE"


@dataclass(eq=True)
class QueryDocument:
    question: str
    ontology_source: str
    graph: QueryGraph
    sparql: str
    version: str = field(default=FORMAT_VERSION)


def dumps(document: QueryDocument) -> str:
    """Canonical text of a document; byte-deterministic for equal documents."""
    if document.version != FORMAT_VERSION:
        raise VersionUnsupported(document.version)
    if document.sparql and not document.sparql.endswith("\n"):
        raise ValueError("sparql text must end with a newline")
    graph = document.graph
    lines = [f"oqb-query v{FORMAT_VERSION}"]
    lines.append(_field_line("question", document.question))
    lines.append(_field_line("ontology", document.ontology_source))
    lines.append(f"node_cap: {graph.node_cap}")
    for node_id in sorted(graph.nodes):
        node = graph.nodes[node_id]
        lines.append(_field_line("node", f"{node.id} {node.kind.value}", node.payload))
    for edge in graph.edges:
        lines.append(_field_line("edge", f"{edge.from_id} {edge.to_id}", edge.predicate))
    for name in graph.selected:
        lines.append(_field_line("select", name))
    if document.sparql:
        for sparql_line in document.sparql[:-1].split("\n"):
            lines.append(_field_line("sparql", sparql_line))
    return "\n".join(lines) + "\n"


def loads(text: str) -> QueryDocument:
    """Parse canonical text back into a document; inverse of :func:`dumps`."""
    lines = text.split("\n")
    header = _HEADER_RE.fullmatch(lines[0])
    if header is None:
        raise FormatError("missing 'oqb-query v<N>' header line")
    if header.group(1) != FORMAT_VERSION:
        raise VersionUnsupported(header.group(1))

    scalars: dict[str, str] = {}
    nodes: list[tuple[int, NodeKind, str]] = []
    edges: list[tuple[int, int, str]] = []
    selected: list[str] = []
    sparql_lines: list[str] | None = None

    for number, raw in enumerate(lines[1:], start=2):
        if not raw:
            continue
        match = _LINE_RE.fullmatch(raw)
        if match is None:
            raise FormatError(f"line {number}: not a recognized field line")
        key, value = match.group(1), match.group(2) or ""
        if key in ("question", "ontology", "node_cap"):
            if key in scalars:
                raise FormatError(f"line {number}: duplicate {key} field")
            scalars[key] = value
        elif key == "node":
            node = _NODE_RE.fullmatch(value)
            if node is None:
                raise FormatError(f"line {number}: malformed node field")
            payload = _unescape(node.group(3) or "", number)
            nodes.append((int(node.group(1)), NodeKind(node.group(2)), payload))
        elif key == "edge":
            edge = _EDGE_RE.fullmatch(value)
            if edge is None:
                raise FormatError(f"line {number}: malformed edge field")
            edges.append((int(edge.group(1)), int(edge.group(2)), _unescape(edge.group(3), number)))
        elif key == "select":
            selected.append(_unescape(value, number))
        else:
            if sparql_lines is None:
                sparql_lines = []
            sparql_lines.append(_unescape(value, number))

    for required in ("question", "ontology", "node_cap"):
        if required not in scalars:
            raise FormatError(f"missing {required} field")
    try:
        node_cap = int(scalars["node_cap"])
    except ValueError:
        raise FormatError("node_cap is not an integer") from None

    try:
        graph = QueryGraph._restore(
            node_cap=node_cap,
            nodes=nodes,
            edges=edges,
            selected=selected,
            question=_unescape(scalars["question"], 2),
        )
    except ValueError as exc:
        raise FormatError(str(exc)) from exc

    sparql = "\n".join(sparql_lines) + "\n" if sparql_lines is not None else ""
    return QueryDocument(
        question=graph.question,
        ontology_source=_unescape(scalars["ontology"], 3),
        graph=graph,
        sparql=sparql,
    )


def save_document(document: QueryDocument, sink: BinaryIO) -> None:
    try:
        sink.write(dumps(document).encode("utf-8"))
    except OSError as exc:
        raise IoFailure(str(exc)) from exc


def load_document(source: bytes | str | BinaryIO) -> QueryDocument:
    if isinstance(source, bytes):
        text = source.decode("utf-8")
    elif isinstance(source, str):
        text = source
    else:
        text = source.read().decode("utf-8")
    return loads(text)


def export_plain(document: QueryDocument, sink: BinaryIO) -> None:
    """Legacy flat export: the question as a comment line, then raw SPARQL.
    One-way by design; load_document rejects it."""
    text = "# Question: " + _escape(document.question) + "\n" + document.sparql
    try:
        sink.write(text.encode("utf-8"))
    except OSError as exc:
        raise IoFailure(str(exc)) from exc


def check_stored_sparql(document: QueryDocument, catalog: ont.Ontology) -> list[Diagnostic]:
    """Advisory staleness check: re-derive the SPARQL and compare with what
    the file recorded. A mismatch is a warning, never an error."""
    try:
        current = serialize(translate(document.graph, catalog))
    except ValidationFailed:
        return [
            Diagnostic(
                Severity.WARNING,
                "STALE_SPARQL",
                "stored query no longer validates against the loaded ontology",
            )
        ]
    if current != document.sparql:
        return [
            Diagnostic(
                Severity.WARNING,
                "STALE_SPARQL",
                "stored SPARQL differs from the current translation",
            )
        ]
    return []


def _escape(value: str) -> str:
    return value.replace("\\", "\\\\").replace("\n", "\\n").replace("\r", "\\r")


def _unescape(value: str, line: int) -> str:
    out: list[str] = []
    i = 0
    escapes = {"\\": "\\", "n": "\n", "r": "\r"}
    while i < len(value):
        ch = value[i]
        if ch == "\\":
            code = value[i + 1] if i + 1 < len(value) else ""
            if code not in escapes:
                raise FormatError(f"line {line}: bad escape \\{code}")
            out.append(escapes[code])
            i += 2
        else:
            out.append(ch)
            i += 1
    return "".join(out)


def _field_line(key: str, *parts: str) -> str:
    body = " ".join(part for part in (parts[:-1] + (_escape(parts[-1]),)) if part != "")
    return f"{key}: {body}" if body else f"{key}:"
