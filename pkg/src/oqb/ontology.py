"""OWL catalog: parse an RDF/XML ontology into classes, subclass edges, and properties.

The parser is deliberately shallow. It collects named `owl:Class` declarations,
`rdfs:subClassOf` edges between named classes, and object/datatype property
declarations with their `rdfs:domain`/`rdfs:range` assertions. Anonymous class
expressions (restrictions, unions) are counted and skipped; no reasoning is
performed. Input is RDF/XML only.
"""

from __future__ import annotations

import enum
import io
import xml.etree.ElementTree as ET
from dataclasses import dataclass, field
from typing import BinaryIO
from urllib.parse import urljoin

from .errors import Diagnostic, OqbError, Severity
from .terms import is_absolute_iri, shorten_iri

OWL_NS = "http://www.w3.org/2002/07/owl#"
RDF_NS = "http://www.w3.org/1999/02/22-rdf-syntax-ns#"
RDFS_NS = "http://www.w3.org/2000/01/rdf-schema#"
XSD_NS = "http://www.w3.org/2001/XMLSchema#"
_XML_NS = "http://www.w3.org/XML/1998/namespace"

_CLASS_TAG = f"{{{OWL_NS}}}Class"
_OBJECT_PROPERTY_TAG = f"{{{OWL_NS}}}ObjectProperty"
_DATATYPE_PROPERTY_TAG = f"{{{OWL_NS}}}DatatypeProperty"
_RDF_PROPERTY_TAG = f"{{{RDF_NS}}}Property"
_DESCRIPTION_TAG = f"{{{RDF_NS}}}Description"
_TYPE_TAG = f"{{{RDF_NS}}}type"
_ABOUT_ATTR = f"{{{RDF_NS}}}about"
_ID_ATTR = f"{{{RDF_NS}}}ID"
_RESOURCE_ATTR = f"{{{RDF_NS}}}resource"
_BASE_ATTR = f"{{{_XML_NS}}}base"
_SUBCLASS_TAG = f"{{{RDFS_NS}}}subClassOf"
_LABEL_TAG = f"{{{RDFS_NS}}}label"
_DOMAIN_TAG = f"{{{RDFS_NS}}}domain"
_RANGE_TAG = f"{{{RDFS_NS}}}range"

_TYPE_CATEGORIES = {
    OWL_NS + "Class": "class",
    RDFS_NS + "Class": "class",
    OWL_NS + "ObjectProperty": "object",
    OWL_NS + "DatatypeProperty": "datatype",
    RDF_NS + "Property": "rdf-property",
}


class MalformedXml(OqbError):
    code = "MALFORMED_XML"


class NotAnOntology(OqbError):
    code = "NOT_AN_ONTOLOGY"


class CyclicSubclass(OqbError):
    code = "CYCLIC_SUBCLASS"

    def __init__(self, members: set[str]):
        self.members = frozenset(members)
        listed = ", ".join(sorted(self.members))
        super().__init__(f"subclass cycle involving: {listed}")


class UnknownClass(OqbError):
    code = "UNKNOWN_CLASS"


class UnknownPrefix(OqbError):
    code = "UNKNOWN_PREFIX"

    def __init__(self, prefix: str):
        self.prefix = prefix
        super().__init__(f"no namespace bound to prefix {prefix!r}")


class PropertyKind(enum.Enum):
    OBJECT = "object"
    DATATYPE = "datatype"


@dataclass(frozen=True, slots=True)
class ClassDef:
    iri: str
    label: str | None = None
    parents: frozenset[str] = frozenset()


@dataclass(frozen=True, slots=True)
class PropertyDef:
    iri: str
    kind: PropertyKind
    domains: frozenset[str] = frozenset()
    ranges: frozenset[str] = frozenset()


@dataclass(frozen=True)
class Ontology:
    """Immutable catalog of one parsed ontology; safe to share across threads."""

    namespaces: dict[str, str]
    classes: dict[str, ClassDef]
    properties: dict[str, PropertyDef]
    source_name: str
    diagnostics: tuple[Diagnostic, ...] = field(default=(), compare=False)


def parse_ontology(document: bytes | str | BinaryIO, source_name: str = "<memory>") -> Ontology:
    """Parse an RDF/XML OWL document into an :class:`Ontology`.

    Raises :class:`MalformedXml` for unparseable XML, :class:`NotAnOntology`
    when the document declares neither classes nor properties, and
    :class:`CyclicSubclass` when the subclass relation has a cycle. Everything
    recoverable (anonymous classes, dangling references, plain `rdf:Property`
    declarations) becomes a warning diagnostic on the returned catalog.
    """
    data = _as_bytes(document)
    root, prefix_decls = _parse_xml(data, source_name)

    base = root.get(_BASE_ATTR)
    namespaces, diagnostics = _build_namespace_table(prefix_decls, base, source_name)

    collector = _Collector(base, source_name)
    for element in root.iter():
        collector.visit(element)
    diagnostics.extend(collector.summary_diagnostics())

    if not collector.classes and not collector.properties:
        raise NotAnOntology(f"{source_name}: no class or property declarations found")

    classes, properties, assembly_diags = _assemble(collector, source_name)
    diagnostics.extend(assembly_diags)

    _reject_cycles(classes)

    return Ontology(
        namespaces=namespaces,
        classes=classes,
        properties=properties,
        source_name=source_name,
        diagnostics=tuple(diagnostics),
    )


def list_classes(ontology: Ontology) -> list[ClassDef]:
    """All classes, sorted lexicographically by IRI."""
    return sorted(ontology.classes.values(), key=lambda c: c.iri)


def list_properties(ontology: Ontology) -> list[PropertyDef]:
    """All properties, sorted lexicographically by IRI."""
    return sorted(ontology.properties.values(), key=lambda p: p.iri)


def subclasses_of(ontology: Ontology, class_iri: str, transitive: bool = False) -> set[str]:
    """Direct children of `class_iri`, or the full descendant closure."""
    if class_iri not in ontology.classes:
        raise UnknownClass(f"not a class in {ontology.source_name}: {class_iri}")
    children: dict[str, set[str]] = {}
    for cls in ontology.classes.values():
        for parent in cls.parents:
            children.setdefault(parent, set()).add(cls.iri)
    direct = children.get(class_iri, set())
    if not transitive:
        return set(direct)
    seen: set[str] = set()
    queue = list(direct)
    while queue:
        current = queue.pop()
        if current in seen:
            continue
        seen.add(current)
        queue.extend(children.get(current, ()))
    return seen


def superclasses_of(ontology: Ontology, class_iri: str) -> set[str]:
    """Ancestor closure of `class_iri` (never contains the class itself)."""
    if class_iri not in ontology.classes:
        raise UnknownClass(f"not a class in {ontology.source_name}: {class_iri}")
    seen: set[str] = set()
    queue = list(ontology.classes[class_iri].parents)
    while queue:
        current = queue.pop()
        if current in seen:
            continue
        seen.add(current)
        queue.extend(ontology.classes[current].parents)
    return seen


def resolve(ontology: Ontology, name: str) -> str:
    """Expand a CURIE through the namespace table; full IRIs pass through."""
    if is_absolute_iri(name):
        return name
    prefix, sep, local = name.partition(":")
    if not sep:
        prefix, local = "", name
    namespace = ontology.namespaces.get(prefix)
    if namespace is None:
        raise UnknownPrefix(prefix)
    return namespace + local


def curie_of(ontology: Ontology, iri: str) -> str | None:
    """Shortest-prefix CURIE for `iri`, or None when no namespace covers it."""
    hit = shorten_iri(iri, ontology.namespaces)
    if hit is None:
        return None
    prefix, local = hit
    return f"{prefix}:{local}"


# -- parsing internals --------------------------------------------------------


def _as_bytes(document: bytes | str | BinaryIO) -> bytes:
    if isinstance(document, bytes):
        return document
    if isinstance(document, str):
        return document.encode("utf-8")
    return document.read()


def _parse_xml(data: bytes, source_name: str) -> tuple[ET.Element, list[tuple[str, str]]]:
    prefix_decls: list[tuple[str, str]] = []
    root: ET.Element | None = None
    try:
        for event, payload in ET.iterparse(io.BytesIO(data), events=("start-ns", "start")):
            if event == "start-ns":
                prefix_decls.append(payload)
            elif root is None:
                root = payload
    except ET.ParseError as exc:
        raise MalformedXml(f"{source_name}: {exc}") from exc
    if root is None:
        raise MalformedXml(f"{source_name}: empty document")
    return root, prefix_decls


def _build_namespace_table(
    prefix_decls: list[tuple[str, str]], base: str | None, source_name: str
) -> tuple[dict[str, str], list[Diagnostic]]:
    table: dict[str, str] = {}
    skipped = 0
    for prefix, uri in prefix_decls:
        if prefix == "xml" or prefix in table:
            continue
        if uri.endswith(("#", "/")):
            table[prefix] = uri
        else:
            skipped += 1
    diagnostics: list[Diagnostic] = []
    if skipped:
        diagnostics.append(
            Diagnostic(
                Severity.WARNING,
                "NAMESPACE_SKIPPED",
                f"skipped {skipped} xmlns declaration(s) not ending in '#' or '/'",
                location=source_name,
            )
        )
    if base:
        base_ns = base if base.endswith(("#", "/")) else base + "#"
        if "" not in table and base_ns not in table.values():
            table[""] = base_ns
    return table, diagnostics


class _Collector:
    """Single document-order walk accumulating raw class/property facts."""

    def __init__(self, base: str | None, source_name: str):
        self.base = base
        self.source_name = source_name
        self.classes: dict[str, dict] = {}
        self.properties: dict[str, dict] = {}
        self.anonymous_skipped = 0
        self.relative_skipped = 0
        self.plain_rdf_properties: list[str] = []

    def visit(self, element: ET.Element) -> None:
        category = self._category(element)
        if category is None:
            return
        iri = self._subject_iri(element)
        if iri is None:
            if category == "class":
                self.anonymous_skipped += 1
            return
        if category == "class":
            self._collect_class(iri, element)
        else:
            self._collect_property(iri, category, element)

    def summary_diagnostics(self) -> list[Diagnostic]:
        diags = []
        if self.anonymous_skipped:
            diags.append(
                Diagnostic(
                    Severity.WARNING,
                    "ANONYMOUS_CLASS_SKIPPED",
                    f"skipped {self.anonymous_skipped} anonymous class expression(s)",
                    location=self.source_name,
                )
            )
        if self.relative_skipped:
            diags.append(
                Diagnostic(
                    Severity.WARNING,
                    "RELATIVE_IRI_SKIPPED",
                    f"skipped {self.relative_skipped} relative reference(s) with no xml:base",
                    location=self.source_name,
                )
            )
        for iri in self.plain_rdf_properties:
            diags.append(
                Diagnostic(
                    Severity.WARNING,
                    "PLAIN_RDF_PROPERTY",
                    f"rdf:Property {iri} ingested as an object property",
                    location=self.source_name,
                )
            )
        return diags

    def _category(self, element: ET.Element) -> str | None:
        if element.tag == _CLASS_TAG:
            return "class"
        if element.tag == _OBJECT_PROPERTY_TAG:
            return "object"
        if element.tag == _DATATYPE_PROPERTY_TAG:
            return "datatype"
        if element.tag == _RDF_PROPERTY_TAG:
            return "rdf-property"
        if element.tag == _DESCRIPTION_TAG:
            for child in element:
                if child.tag == _TYPE_TAG:
                    target = child.get(_RESOURCE_ATTR)
                    if target and target in _TYPE_CATEGORIES:
                        return _TYPE_CATEGORIES[target]
        return None

    def _subject_iri(self, element: ET.Element) -> str | None:
        about = element.get(_ABOUT_ATTR)
        if about is not None:
            return self._resolve_reference(about)
        node_id = element.get(_ID_ATTR)
        if node_id is not None:
            return self._resolve_reference("#" + node_id)
        return None

    def _resolve_reference(self, value: str) -> str | None:
        if is_absolute_iri(value):
            return value
        if self.base is None:
            self.relative_skipped += 1
            return None
        resolved = urljoin(self.base, value)
        if not is_absolute_iri(resolved):
            self.relative_skipped += 1
            return None
        return resolved

    def _object_reference(self, element: ET.Element) -> str | None:
        """Named target of a subClassOf/domain/range child, if any."""
        target = element.get(_RESOURCE_ATTR)
        if target is not None:
            return self._resolve_reference(target)
        for child in element:
            nested = child.get(_ABOUT_ATTR)
            if nested is not None:
                return self._resolve_reference(nested)
        return None

    def _collect_class(self, iri: str, element: ET.Element) -> None:
        entry = self.classes.setdefault(iri, {"label": None, "parents": set()})
        for child in element:
            if child.tag == _SUBCLASS_TAG:
                parent = self._object_reference(child)
                if parent is None:
                    self.anonymous_skipped += 1
                else:
                    entry["parents"].add(parent)
            elif child.tag == _LABEL_TAG and entry["label"] is None:
                text = (child.text or "").strip()
                entry["label"] = text or None

    def _collect_property(self, iri: str, category: str, element: ET.Element) -> None:
        if category == "rdf-property" and iri not in self.properties:
            self.plain_rdf_properties.append(iri)
        kind = PropertyKind.DATATYPE if category == "datatype" else PropertyKind.OBJECT
        entry = self.properties.setdefault(iri, {"kind": kind, "domains": set(), "ranges": set()})
        for child in element:
            bucket = None
            if child.tag == _DOMAIN_TAG:
                bucket = entry["domains"]
            elif child.tag == _RANGE_TAG:
                bucket = entry["ranges"]
            if bucket is None:
                continue
            target = self._object_reference(child)
            if target is None:
                self.anonymous_skipped += 1
            else:
                bucket.add(target)


def _assemble(
    collector: _Collector, source_name: str
) -> tuple[dict[str, ClassDef], dict[str, PropertyDef], list[Diagnostic]]:
    diagnostics: list[Diagnostic] = []
    class_iris = set(collector.classes)

    overlap = class_iris & set(collector.properties)
    for iri in sorted(overlap):
        diagnostics.append(
            Diagnostic(
                Severity.WARNING,
                "CLASS_PROPERTY_CONFLICT",
                f"{iri} declared as both class and property; kept the class",
                location=source_name,
            )
        )
        del collector.properties[iri]

    classes: dict[str, ClassDef] = {}
    for iri in sorted(collector.classes):
        raw = collector.classes[iri]
        kept_parents = set()
        for parent in sorted(raw["parents"]):
            if parent in class_iris:
                kept_parents.add(parent)
            else:
                diagnostics.append(
                    Diagnostic(
                        Severity.WARNING,
                        "DANGLING_SUPERCLASS",
                        f"{iri}: superclass {parent} is not a declared class; edge dropped",
                        location=source_name,
                    )
                )
        classes[iri] = ClassDef(iri=iri, label=raw["label"], parents=frozenset(kept_parents))

    properties: dict[str, PropertyDef] = {}
    for iri in sorted(collector.properties):
        raw = collector.properties[iri]
        for ref in sorted(raw["domains"] | raw["ranges"]):
            if ref not in class_iris and not ref.startswith(XSD_NS):
                diagnostics.append(
                    Diagnostic(
                        Severity.WARNING,
                        "DANGLING_REFERENCE",
                        f"{iri}: domain/range {ref} is not a declared class",
                        location=source_name,
                    )
                )
        properties[iri] = PropertyDef(
            iri=iri,
            kind=raw["kind"],
            domains=frozenset(raw["domains"]),
            ranges=frozenset(raw["ranges"]),
        )

    return classes, properties, diagnostics


def _reject_cycles(classes: dict[str, ClassDef]) -> None:
    # Colors: 0 unvisited, 1 on the current path, 2 done.
    color: dict[str, int] = {iri: 0 for iri in classes}
    path: list[str] = []

    def walk(iri: str) -> None:
        color[iri] = 1
        path.append(iri)
        for parent in sorted(classes[iri].parents):
            if color[parent] == 1:
                cycle = path[path.index(parent):]
                raise CyclicSubclass(set(cycle))
            if color[parent] == 0:
                walk(parent)
        path.pop()
        color[iri] = 2

    for iri in sorted(classes):
        if color[iri] == 0:
            walk(iri)
