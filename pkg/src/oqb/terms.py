"""RDF term types shared by the query IR, the triple store, and the catalog.

Terms are small frozen dataclasses rather than str subclasses so that an IRI
and a literal with the same text never compare equal.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

VARIABLE_NAME_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")

# Conservative CURIE local part: what the serializer is willing to shorten.
# Anything outside this stays in <...> form.
LOCAL_NAME_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_\-]*\Z")


def is_absolute_iri(value: str) -> bool:
    """True for the IRI shapes accepted everywhere: `scheme://...` or a URN."""
    if not value or any(ch.isspace() for ch in value):
        return False
    return "://" in value or value.startswith("urn:")


@dataclass(frozen=True, slots=True)
class Iri:
    value: str

    def __post_init__(self) -> None:
        if not is_absolute_iri(self.value):
            raise ValueError(f"not an absolute IRI: {self.value!r}")


@dataclass(frozen=True, slots=True)
class Variable:
    """A query variable; the name is stored without the '?' sigil."""

    name: str

    def __post_init__(self) -> None:
        if not VARIABLE_NAME_RE.match(self.name):
            raise ValueError(f"bad variable name: {self.name!r}")


@dataclass(frozen=True, slots=True)
class Literal:
    """A plain literal; matching is exact on the lexical form."""

    lexical: str


RdfTerm = Iri | Variable | Literal
GroundTerm = Iri | Literal


def shorten_iri(iri: str, namespaces: dict[str, str]) -> tuple[str, str] | None:
    """Best CURIE split of `iri` as (prefix, local), or None if nothing covers it.

    The longest covering namespace wins; ties break on the lexicographically
    smallest prefix, so the choice is deterministic for any namespace table.
    """
    candidates = []
    for prefix, namespace in namespaces.items():
        if not iri.startswith(namespace):
            continue
        local = iri[len(namespace):]
        if LOCAL_NAME_RE.match(local):
            candidates.append((-len(namespace), prefix, local))
    if not candidates:
        return None
    _, prefix, local = min(candidates)
    return prefix, local


def sort_text(term: GroundTerm) -> str:
    """Canonical text used for deterministic row ordering."""
    if isinstance(term, Iri):
        return f"<{term.value}>"
    return f'"{term.lexical}"'
