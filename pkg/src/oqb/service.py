"""HTTP facade over the query builder: sessions, catalog, graph, execution.

Each session owns one query graph and optionally one parsed ontology; the
registry triple store is shared read-only across sessions. Mutations within a
session are serialized by a per-session lock. Wire field names are normative
and documented in API.md; errors always use the {"error": {...}} envelope and
never mutate session state.
"""

from __future__ import annotations

import threading
import time
import uuid
from dataclasses import dataclass, field as dataclass_field

from fastapi import FastAPI, Request, Response
from fastapi.responses import JSONResponse
from pydantic import BaseModel, ConfigDict, Field

from . import ontology as ont
from . import persistence
from .errors import Diagnostic, OqbError, has_errors
from .graph import (
    BadPayload,
    BadVariableName,
    CapExceeded,
    NodeKind,
    QueryGraph,
    SelfLoop,
    UnknownEdge,
    UnknownNode,
    UnknownVariable,
    validate,
)
from .sparql import ValidationFailed, serialize, term_text, translate
from .store import TripleStore, evaluate
from .terms import Iri

DEFAULT_SESSION_TTL = 3600.0


class ApiError(Exception):
    def __init__(self, status: int, code: str, message: str, diagnostics=None):
        self.status = status
        self.code = code
        self.message = message
        self.diagnostics = diagnostics or []
        super().__init__(message)


@dataclass
class Session:
    id: str
    graph: QueryGraph
    ontology: ont.Ontology | None = None
    last_used: float = 0.0
    lock: threading.Lock = dataclass_field(default_factory=threading.Lock)


class NodeRequest(BaseModel):
    kind: str
    payload: str


class EdgeRequest(BaseModel):
    model_config = ConfigDict(populate_by_name=True)

    from_id: int = Field(alias="from")
    to_id: int = Field(alias="to")
    predicate: str


class SelectedRequest(BaseModel):
    selected: list[str]


class QuestionRequest(BaseModel):
    question: str


def create_app(
    registry: TripleStore,
    default_node_cap: int = 12,
    session_ttl: float = DEFAULT_SESSION_TTL,
    assets_dir: str | None = None,
) -> FastAPI:
    app = FastAPI(title="oqb", docs_url=None, redoc_url=None)
    sessions: dict[str, Session] = {}
    sessions_lock = threading.Lock()

    @app.exception_handler(ApiError)
    async def handle_api_error(request: Request, exc: ApiError) -> JSONResponse:
        body = {
            "error": {
                "code": exc.code,
                "message": exc.message,
                "diagnostics": [_diag_json(d) for d in exc.diagnostics],
            }
        }
        return JSONResponse(status_code=exc.status, content=body)

    def get_session(session_id: str) -> Session:
        now = time.monotonic()
        with sessions_lock:
            expired = [s for s in sessions.values() if now - s.last_used > session_ttl]
            for stale in expired:
                del sessions[stale.id]
            session = sessions.get(session_id)
            if session is None:
                raise ApiError(404, "SESSION_NOT_FOUND", f"no session {session_id}")
            session.last_used = now
            return session

    @app.get("/api/health")
    def health() -> dict:
        return {"status": "ok", "triples": len(registry)}

    @app.post("/api/sessions", status_code=201)
    def create_session() -> dict:
        session = Session(
            id=uuid.uuid4().hex,
            graph=QueryGraph(node_cap=default_node_cap),
            last_used=time.monotonic(),
        )
        with sessions_lock:
            sessions[session.id] = session
        return {"id": session.id, "node_cap": default_node_cap}

    @app.post("/api/sessions/{session_id}/ontology")
    async def upload_ontology(session_id: str, request: Request, name: str = "upload.owl") -> dict:
        session = get_session(session_id)
        body = await request.body()
        try:
            catalog = ont.parse_ontology(body, source_name=name)
        except OqbError as exc:
            raise ApiError(422, exc.code, str(exc)) from exc
        with session.lock:
            session.ontology = catalog
        return {
            "source": catalog.source_name,
            "classes": len(catalog.classes),
            "properties": len(catalog.properties),
            "diagnostics": [_diag_json(d) for d in catalog.diagnostics],
        }

    @app.get("/api/sessions/{session_id}/catalog")
    def get_catalog(session_id: str) -> dict:
        session = get_session(session_id)
        catalog = _require_ontology(session)
        classes = [
            {
                "iri": c.iri,
                "curie": ont.curie_of(catalog, c.iri),
                "label": c.label,
                "parents": sorted(c.parents),
            }
            for c in ont.list_classes(catalog)
        ]
        properties = [
            {
                "iri": p.iri,
                "curie": ont.curie_of(catalog, p.iri),
                "kind": p.kind.value,
                "domains": sorted(p.domains),
                "ranges": sorted(p.ranges),
            }
            for p in ont.list_properties(catalog)
        ]
        return {
            "source": catalog.source_name,
            "namespaces": dict(sorted(catalog.namespaces.items())),
            "classes": classes,
            "properties": properties,
        }

    @app.get("/api/sessions/{session_id}/graph")
    def get_graph(session_id: str) -> dict:
        session = get_session(session_id)
        with session.lock:
            return _state(session)

    @app.post("/api/sessions/{session_id}/graph/nodes")
    def add_node(session_id: str, body: NodeRequest) -> dict:
        session = get_session(session_id)
        try:
            kind = NodeKind(body.kind)
        except ValueError:
            raise ApiError(422, "BAD_PAYLOAD", f"unknown node kind {body.kind!r}") from None
        with session.lock:
            node_id = _domain(lambda: session.graph.add_node(kind, body.payload))
            return {"id": node_id, **_state(session)}

    @app.post("/api/sessions/{session_id}/graph/edges")
    def add_edge(session_id: str, body: EdgeRequest) -> dict:
        session = get_session(session_id)
        with session.lock:
            index = _domain(
                lambda: session.graph.add_edge(body.from_id, body.to_id, body.predicate)
            )
            return {"index": index, **_state(session)}

    @app.delete("/api/sessions/{session_id}/graph/nodes/{node_id}")
    def remove_node(session_id: str, node_id: int) -> dict:
        session = get_session(session_id)
        with session.lock:
            _domain(lambda: session.graph.remove_node(node_id))
            return _state(session)

    @app.delete("/api/sessions/{session_id}/graph/edges/{index}")
    def remove_edge(session_id: str, index: int) -> dict:
        session = get_session(session_id)
        with session.lock:
            _domain(lambda: session.graph.remove_edge(index))
            return _state(session)

    @app.post("/api/sessions/{session_id}/graph/clear")
    def clear_graph(session_id: str) -> dict:
        session = get_session(session_id)
        with session.lock:
            session.graph.clear()
            return _state(session)

    @app.put("/api/sessions/{session_id}/graph/selected")
    def set_selected(session_id: str, body: SelectedRequest) -> dict:
        session = get_session(session_id)
        with session.lock:
            _domain(lambda: session.graph.set_selected(body.selected))
            return _state(session)

    @app.put("/api/sessions/{session_id}/graph/question")
    def set_question(session_id: str, body: QuestionRequest) -> dict:
        session = get_session(session_id)
        with session.lock:
            session.graph.set_question(body.question)
            return _state(session)

    @app.post("/api/sessions/{session_id}/execute")
    def execute(session_id: str) -> dict:
        session = get_session(session_id)
        catalog = _require_ontology(session)
        with session.lock:
            try:
                query = translate(session.graph, catalog)
            except ValidationFailed as exc:
                raise ApiError(422, exc.code, str(exc), exc.diagnostics) from exc
        table = evaluate(query, registry)
        rows = [
            [_cell_json(term, query.prefixes) for term in row]
            for row in table.rows
        ]
        return {"sparql": serialize(query), "vars": list(table.vars), "rows": rows}

    @app.get("/api/sessions/{session_id}/document")
    def save_document(session_id: str) -> Response:
        session = get_session(session_id)
        with session.lock:
            if not session.graph.nodes:
                raise ApiError(409, "EMPTY_GRAPH", "nothing to persist: the graph is empty")
            document = persistence.QueryDocument(
                question=session.graph.question,
                ontology_source=session.ontology.source_name if session.ontology else "",
                graph=session.graph.copy(),
                sparql=_current_sparql(session) or "",
            )
        return Response(
            content=persistence.dumps(document),
            media_type="text/plain; charset=utf-8",
            headers={"Content-Disposition": 'attachment; filename="query.oqb"'},
        )

    @app.put("/api/sessions/{session_id}/document")
    async def load_document(session_id: str, request: Request) -> dict:
        session = get_session(session_id)
        body = await request.body()
        try:
            document = persistence.load_document(body)
        except OqbError as exc:
            raise ApiError(422, exc.code, str(exc)) from exc
        with session.lock:
            cap = session.graph.node_cap
            if len(document.graph.nodes) > cap:
                raise ApiError(
                    409, "CAP_EXCEEDED", f"document has more nodes than the session cap ({cap})"
                )
            loaded = document.graph
            session.graph = QueryGraph._restore(
                node_cap=cap,
                nodes=[(n.id, n.kind, n.payload) for _, n in sorted(loaded.nodes.items())],
                edges=[(e.from_id, e.to_id, e.predicate) for e in loaded.edges],
                selected=list(loaded.selected),
                question=loaded.question,
            )
            state = _state(session)
            if session.ontology is not None:
                advisory = persistence.check_stored_sparql(document, session.ontology)
                state["diagnostics"] = [_diag_json(d) for d in advisory] + state["diagnostics"]
            return state

    def _state(session: Session) -> dict:
        graph = session.graph
        payload = {
            "graph": {
                "node_cap": graph.node_cap,
                "question": graph.question,
                "nodes": [
                    {"id": n.id, "kind": n.kind.value, "payload": n.payload}
                    for _, n in sorted(graph.nodes.items())
                ],
                "edges": [
                    {"from": e.from_id, "to": e.to_id, "predicate": e.predicate}
                    for e in graph.edges
                ],
                "selected": list(graph.selected),
            },
            "diagnostics": [],
        }
        if session.ontology is not None:
            diagnostics = validate(graph, session.ontology, strict=True)
            payload["diagnostics"] = [_diag_json(d) for d in diagnostics]
            if not has_errors(diagnostics):
                payload["sparql"] = serialize(translate(graph, session.ontology))
        return payload

    def _current_sparql(session: Session) -> str | None:
        if session.ontology is None:
            return None
        try:
            return serialize(translate(session.graph, session.ontology))
        except ValidationFailed:
            return None

    def _require_ontology(session: Session) -> ont.Ontology:
        if session.ontology is None:
            raise ApiError(409, "ONTOLOGY_MISSING", "no ontology uploaded for this session")
        return session.ontology

    if assets_dir is not None:
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=assets_dir, html=True), name="assets")

    return app


_STATUS_BY_ERROR = {
    CapExceeded: 409,
    UnknownNode: 404,
    UnknownEdge: 404,
    BadVariableName: 422,
    BadPayload: 422,
    SelfLoop: 422,
    UnknownVariable: 422,
}


def _domain(operation):
    """Run a graph mutation, mapping domain errors onto the HTTP envelope."""
    try:
        return operation()
    except OqbError as exc:
        status = _STATUS_BY_ERROR.get(type(exc), 422)
        raise ApiError(status, exc.code, str(exc)) from exc


def _diag_json(diagnostic: Diagnostic) -> dict:
    return {
        "severity": diagnostic.severity.value,
        "code": diagnostic.code,
        "message": diagnostic.message,
        "subject": diagnostic.subject,
        "subject_kind": diagnostic.subject_kind,
    }


def _cell_json(term, prefixes: dict[str, str]) -> dict:
    kind = "iri" if isinstance(term, Iri) else "literal"
    value = term.value if isinstance(term, Iri) else term.lexical
    return {"kind": kind, "value": value, "text": term_text(term, prefixes)}
