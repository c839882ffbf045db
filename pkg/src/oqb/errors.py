"""Error base class and the structured diagnostic record shared by all modules."""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Iterable


class OqbError(Exception):
    """Base class for domain errors.

    `code` is a stable machine-readable identifier reused by the CLI
    (stderr diagnostics) and the HTTP service (error envelopes).
    """

    code = "ERROR"


class Severity(enum.Enum):
    ERROR = "error"
    WARNING = "warning"


@dataclass(frozen=True, slots=True)
class Diagnostic:
    """One validation or parse finding.

    `subject`/`subject_kind` locate graph-scoped findings (a node id or an
    edge index); `location` locates document-scoped ones (file name, line).
    """

    severity: Severity
    code: str
    message: str
    subject: int | None = None
    subject_kind: str | None = None
    location: str | None = None

    @property
    def is_error(self) -> bool:
        return self.severity is Severity.ERROR


def has_errors(diagnostics: Iterable[Diagnostic]) -> bool:
    return any(d.is_error for d in diagnostics)
