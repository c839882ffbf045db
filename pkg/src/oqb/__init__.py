"""Ontology-driven graph query builder.

Load an OWL ontology, build a query as a subject-predicate-object graph
validated against it, translate the graph deterministically to SPARQL SELECT,
and execute it against an embedded N-Triples registry.
"""

from .errors import Diagnostic, OqbError, Severity, has_errors
from .graph import NodeKind, QueryEdge, QueryGraph, QueryNode, validate
from .ontology import ClassDef, Ontology, PropertyDef, PropertyKind, parse_ontology
from .persistence import QueryDocument, load_document, save_document
from .sparql import SparqlQuery, TriplePattern, parse_sparql, serialize, translate
from .store import BindingTable, GroundTriple, TripleStore, evaluate, load_ntriples
from .terms import Iri, Literal, Variable

__all__ = [
    "BindingTable",
    "ClassDef",
    "Diagnostic",
    "GroundTriple",
    "Iri",
    "Literal",
    "NodeKind",
    "Ontology",
    "OqbError",
    "PropertyDef",
    "PropertyKind",
    "QueryDocument",
    "QueryEdge",
    "QueryGraph",
    "QueryNode",
    "Severity",
    "SparqlQuery",
    "TriplePattern",
    "TripleStore",
    "Variable",
    "evaluate",
    "has_errors",
    "load_document",
    "load_ntriples",
    "parse_ontology",
    "parse_sparql",
    "save_document",
    "serialize",
    "translate",
    "validate",
]

__version__ = "0.1.0"
