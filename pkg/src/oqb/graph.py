"""Editable query graph: nodes, directed predicate edges, selection, validation.

A query under construction is a small directed graph. Circle/rectangle roles
from the visual notation are derived from edge direction, never stored. All
mutations are transactional: a raised error leaves the graph exactly as it was.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass, field

from . import ontology as ont
from .errors import Diagnostic, OqbError, Severity

VARIABLE_PAYLOAD_RE = re.compile(r"\?[A-Za-z_][A-Za-z0-9_]*\Z")

DEFAULT_NODE_CAP = 12


class CapExceeded(OqbError):
    code = "CAP_EXCEEDED"


class BadVariableName(OqbError):
    code = "BAD_VARIABLE_NAME"


class BadPayload(OqbError):
    code = "BAD_PAYLOAD"


class UnknownNode(OqbError):
    code = "UNKNOWN_NODE"


class UnknownEdge(OqbError):
    code = "UNKNOWN_EDGE"


class UnknownVariable(OqbError):
    code = "UNKNOWN_VARIABLE"


class SelfLoop(OqbError):
    code = "SELF_LOOP"


class NodeKind(enum.Enum):
    VARIABLE = "variable"
    CLASS_TERM = "class"
    LITERAL = "literal"


@dataclass(frozen=True, slots=True)
class QueryNode:
    id: int
    kind: NodeKind
    payload: str


@dataclass(frozen=True, slots=True)
class QueryEdge:
    """Directed subject-to-object edge labeled with a predicate Curie or IRI."""

    from_id: int
    to_id: int
    predicate: str


@dataclass(eq=True)
class QueryGraph:
    """Mutable query graph; single-writer, compared structurally.

    `selected` and node payloads keep the '?' sigil; the sigil is stripped
    only when terms cross into the SPARQL IR.
    """

    node_cap: int = DEFAULT_NODE_CAP
    nodes: dict[int, QueryNode] = field(default_factory=dict)
    edges: list[QueryEdge] = field(default_factory=list)
    selected: list[str] = field(default_factory=list)
    question: str = ""
    _next_id: int = field(default=1, compare=False, repr=False)

    def __post_init__(self) -> None:
        if self.node_cap < 1:
            raise ValueError("node_cap must be positive")

    def add_node(self, kind: NodeKind, payload: str) -> int:
        """Insert a node and return its fresh id."""
        _check_payload(kind, payload)
        if len(self.nodes) >= self.node_cap:
            raise CapExceeded(f"node limit ({self.node_cap}) reached")
        node_id = self._next_id
        self._next_id += 1
        self.nodes[node_id] = QueryNode(node_id, kind, payload)
        return node_id

    def add_edge(self, from_id: int, to_id: int, predicate: str) -> int:
        """Append a subject→object edge and return its index."""
        for node_id in (from_id, to_id):
            if node_id not in self.nodes:
                raise UnknownNode(f"no node with id {node_id}")
        if from_id == to_id:
            raise SelfLoop(f"edge from node {from_id} to itself")
        if not predicate or any(c.isspace() for c in predicate):
            raise BadPayload(f"predicate must be a Curie or IRI: {predicate!r}")
        self.edges.append(QueryEdge(from_id, to_id, predicate))
        return len(self.edges) - 1

    def remove_node(self, node_id: int) -> None:
        """Remove a node, its incident edges, and its orphaned selection entry."""
        node = self.nodes.get(node_id)
        if node is None:
            raise UnknownNode(f"no node with id {node_id}")
        del self.nodes[node_id]
        self.edges = [e for e in self.edges if node_id not in (e.from_id, e.to_id)]
        if node.kind is NodeKind.VARIABLE and node.payload not in self.variable_names():
            self.selected = [v for v in self.selected if v != node.payload]

    def remove_edge(self, index: int) -> None:
        if not 0 <= index < len(self.edges):
            raise UnknownEdge(f"no edge at index {index}")
        del self.edges[index]

    def clear(self) -> None:
        """Empty the graph; node_cap survives, ids restart from 1."""
        self.nodes = {}
        self.edges = []
        self.selected = []
        self.question = ""
        self._next_id = 1

    def set_selected(self, names: list[str]) -> None:
        """Replace the projection list wholesale, preserving the given order."""
        live = self.variable_names()
        for name in names:
            if name not in live:
                raise UnknownVariable(f"no variable node named {name}")
        self.selected = list(names)

    def set_question(self, text: str) -> None:
        self.question = text

    def variable_names(self) -> set[str]:
        return {n.payload for n in self.nodes.values() if n.kind is NodeKind.VARIABLE}

    def copy(self) -> QueryGraph:
        clone = QueryGraph(node_cap=self.node_cap)
        clone.nodes = dict(self.nodes)
        clone.edges = list(self.edges)
        clone.selected = list(self.selected)
        clone.question = self.question
        clone._next_id = self._next_id
        return clone

    @classmethod
    def _restore(
        cls,
        node_cap: int,
        nodes: list[tuple[int, NodeKind, str]],
        edges: list[tuple[int, int, str]],
        selected: list[str],
        question: str,
    ) -> QueryGraph:
        """Rebuild a graph with explicit node ids; raises ValueError on any
        invariant violation. Persistence wraps this in its own error type."""
        if len(nodes) > node_cap:
            raise ValueError(f"{len(nodes)} nodes exceed node_cap {node_cap}")
        graph = cls(node_cap=node_cap)
        for node_id, kind, payload in nodes:
            if node_id < 1:
                raise ValueError(f"node id must be positive: {node_id}")
            if node_id in graph.nodes:
                raise ValueError(f"duplicate node id {node_id}")
            try:
                _check_payload(kind, payload)
            except OqbError as exc:
                raise ValueError(str(exc)) from exc
            graph.nodes[node_id] = QueryNode(node_id, kind, payload)
        for from_id, to_id, predicate in edges:
            try:
                graph.add_edge(from_id, to_id, predicate)
            except OqbError as exc:
                raise ValueError(str(exc)) from exc
        try:
            graph.set_selected(selected)
        except OqbError as exc:
            raise ValueError(str(exc)) from exc
        graph.question = question
        graph._next_id = max(graph.nodes, default=0) + 1
        return graph


def _check_payload(kind: NodeKind, payload: str) -> None:
    if kind is NodeKind.VARIABLE:
        if not VARIABLE_PAYLOAD_RE.match(payload):
            raise BadVariableName(f"not a valid variable name: {payload!r}")
    elif kind is NodeKind.CLASS_TERM:
        if not payload or any(c.isspace() for c in payload):
            raise BadPayload(f"class payload must be a Curie or IRI: {payload!r}")
    # Literal payloads are arbitrary lexical strings, the empty string included.


def validate(graph: QueryGraph, catalog: ont.Ontology, strict: bool = True) -> list[Diagnostic]:
    """Check a graph against an ontology; diagnostics only, never raises.

    Error codes: NO_EDGES, EMPTY_SELECTION, UNUSED_VARIABLE, LITERAL_SUBJECT,
    UNKNOWN_PREFIX, UNKNOWN_PROPERTY, UNKNOWN_CLASS (the last three downgrade
    to warnings when strict is false). Domain/range mismatches are warnings in
    both modes; a warning never blocks translation.
    """
    diags: list[Diagnostic] = []
    lax = Severity.ERROR if strict else Severity.WARNING

    if not graph.edges:
        diags.append(Diagnostic(Severity.ERROR, "NO_EDGES", "graph has no edges"))
    if not graph.selected:
        diags.append(Diagnostic(Severity.ERROR, "EMPTY_SELECTION", "no output variables selected"))

    # node_class[id] holds the resolved class IRI of known ClassTerm nodes
    node_class: dict[int, str] = {}
    edge_ends = {e.from_id for e in graph.edges} | {e.to_id for e in graph.edges}

    for node_id in sorted(graph.nodes):
        node = graph.nodes[node_id]
        if node.kind is NodeKind.CLASS_TERM:
            try:
                iri = ont.resolve(catalog, node.payload)
            except ont.UnknownPrefix as exc:
                diags.append(
                    Diagnostic(lax, "UNKNOWN_PREFIX", str(exc), subject=node_id, subject_kind="node")
                )
                continue
            if iri in catalog.classes:
                node_class[node_id] = iri
            else:
                diags.append(
                    Diagnostic(
                        lax,
                        "UNKNOWN_CLASS",
                        f"{node.payload} is not a class in {catalog.source_name}",
                        subject=node_id,
                        subject_kind="node",
                    )
                )
        elif node.kind is NodeKind.VARIABLE and node_id not in edge_ends:
            diags.append(
                Diagnostic(
                    Severity.ERROR,
                    "UNUSED_VARIABLE",
                    f"variable {node.payload} participates in no edge",
                    subject=node_id,
                    subject_kind="node",
                )
            )

    for index, edge in enumerate(graph.edges):
        if graph.nodes[edge.from_id].kind is NodeKind.LITERAL:
            diags.append(
                Diagnostic(
                    Severity.ERROR,
                    "LITERAL_SUBJECT",
                    "a literal node cannot be the subject of an edge",
                    subject=index,
                    subject_kind="edge",
                )
            )
        try:
            prop_iri = ont.resolve(catalog, edge.predicate)
        except ont.UnknownPrefix as exc:
            diags.append(
                Diagnostic(lax, "UNKNOWN_PREFIX", str(exc), subject=index, subject_kind="edge")
            )
            continue
        prop = catalog.properties.get(prop_iri)
        if prop is None:
            diags.append(
                Diagnostic(
                    lax,
                    "UNKNOWN_PROPERTY",
                    f"{edge.predicate} is not a property in {catalog.source_name}",
                    subject=index,
                    subject_kind="edge",
                )
            )
            continue
        diags.extend(_signature_warnings(graph, catalog, index, edge, prop, node_class))

    return diags


def _signature_warnings(
    graph: QueryGraph,
    catalog: ont.Ontology,
    index: int,
    edge: QueryEdge,
    prop: ont.PropertyDef,
    node_class: dict[int, str],
) -> list[Diagnostic]:
    """Domain/range compatibility, using the subclass closure.

    A class C satisfies a declared domain/range set when it equals or descends
    from some member. Only ClassTerm nodes have an inferable class; variables
    are never warned about.
    """
    warnings: list[Diagnostic] = []

    subject_class = node_class.get(edge.from_id)
    if subject_class is not None and prop.domains:
        if not _compatible(catalog, subject_class, prop.domains):
            warnings.append(
                Diagnostic(
                    Severity.WARNING,
                    "DOMAIN_MISMATCH",
                    f"{edge.predicate}: subject class {subject_class} not in declared domain",
                    subject=index,
                    subject_kind="edge",
                )
            )

    obj = graph.nodes[edge.to_id]
    if obj.kind is NodeKind.LITERAL and prop.kind is ont.PropertyKind.OBJECT:
        warnings.append(
            Diagnostic(
                Severity.WARNING,
                "RANGE_MISMATCH",
                f"{edge.predicate}: object property used with a literal object",
                subject=index,
                subject_kind="edge",
            )
        )
    elif obj.kind is NodeKind.CLASS_TERM:
        if prop.kind is ont.PropertyKind.DATATYPE:
            warnings.append(
                Diagnostic(
                    Severity.WARNING,
                    "RANGE_MISMATCH",
                    f"{edge.predicate}: datatype property used with a resource object",
                    subject=index,
                    subject_kind="edge",
                )
            )
        else:
            object_class = node_class.get(edge.to_id)
            class_ranges = frozenset(r for r in prop.ranges if not r.startswith(ont.XSD_NS))
            if object_class is not None and class_ranges:
                if not _compatible(catalog, object_class, class_ranges):
                    warnings.append(
                        Diagnostic(
                            Severity.WARNING,
                            "RANGE_MISMATCH",
                            f"{edge.predicate}: object class {object_class} not in declared range",
                            subject=index,
                            subject_kind="edge",
                        )
                    )
    return warnings


def _compatible(catalog: ont.Ontology, class_iri: str, declared: frozenset[str]) -> bool:
    if class_iri in declared:
        return True
    return bool(ont.superclasses_of(catalog, class_iri) & declared)
