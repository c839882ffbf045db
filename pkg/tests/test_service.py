from __future__ import annotations

import time

import pytest
from fastapi.testclient import TestClient

from oqb import fixtures
from oqb.service import create_app

SENSOR = "http://topps.example.org/sensor#"
OWL_BYTES = fixtures.read_fixture("sensor.owl")
GOLDEN_RQ = fixtures.read_fixture("golden/experiment1.rq").decode("utf-8")


@pytest.fixture()
def client(data):
    return TestClient(create_app(data))


@pytest.fixture()
def session(client):
    response = client.post("/api/sessions")
    assert response.status_code == 201
    return response.json()["id"]


def upload_ontology(client, session) -> dict:
    response = client.post(
        f"/api/sessions/{session}/ontology", params={"name": "sensor.owl"}, content=OWL_BYTES
    )
    assert response.status_code == 200
    return response.json()


def build_experiment1(client, session) -> None:
    upload_ontology(client, session)
    add = lambda kind, payload: client.post(
        f"/api/sessions/{session}/graph/nodes", json={"kind": kind, "payload": payload}
    )
    assert add("variable", "?x").json()["id"] == 1
    assert add("variable", "?image").json()["id"] == 2
    edge = client.post(
        f"/api/sessions/{session}/graph/edges",
        json={"from": 1, "to": 2, "predicate": "tp:hasCameraResource"},
    )
    assert edge.json()["index"] == 0
    client.put(f"/api/sessions/{session}/graph/selected", json={"selected": ["?image"]})
    client.put(
        f"/api/sessions/{session}/graph/question",
        json={"question": "Find the Image from the Camera Sensor"},
    )


# -- plumbing ---------------------------------------------------------------------


def test_health(client):
    assert client.get("/api/health").json() == {"status": "ok", "triples": 9}


def test_unknown_session_yields_the_error_envelope(client):
    response = client.get("/api/sessions/nope/graph")
    assert response.status_code == 404
    body = response.json()
    assert set(body) == {"error"}
    assert set(body["error"]) == {"code", "message", "diagnostics"}
    assert body["error"]["code"] == "SESSION_NOT_FOUND"
    assert body["error"]["diagnostics"] == []


def test_sessions_expire(data):
    client = TestClient(create_app(data, session_ttl=0.01))
    session = client.post("/api/sessions").json()["id"]
    time.sleep(0.05)
    assert client.get(f"/api/sessions/{session}/graph").status_code == 404


def test_static_assets_are_served_after_the_api(data, tmp_path):
    (tmp_path / "index.html").write_text("<!doctype html><title>oqb</title>")
    client = TestClient(create_app(data, assets_dir=str(tmp_path)))
    assert client.get("/api/health").status_code == 200
    page = client.get("/")
    assert page.status_code == 200
    assert "oqb" in page.text


# -- ontology and catalog -----------------------------------------------------------


def test_upload_ontology_reports_shape(client, session):
    body = upload_ontology(client, session)
    assert body["source"] == "sensor.owl"
    assert body["classes"] == 10
    assert body["properties"] == 7
    assert body["diagnostics"] == []


def test_upload_rejects_malformed_xml(client, session):
    response = client.post(f"/api/sessions/{session}/ontology", content=b"<rdf:RDF")
    assert response.status_code == 422
    assert response.json()["error"]["code"] == "MALFORMED_XML"


def test_catalog_requires_an_ontology(client, session):
    response = client.get(f"/api/sessions/{session}/catalog")
    assert response.status_code == 409
    assert response.json()["error"]["code"] == "ONTOLOGY_MISSING"


def test_catalog_lists_classes_and_properties(client, session):
    upload_ontology(client, session)
    body = client.get(f"/api/sessions/{session}/catalog").json()
    assert body["namespaces"]["tp"] == SENSOR
    by_curie = {c["curie"]: c for c in body["classes"]}
    camera = by_curie["tp:CameraSensor"]
    assert camera["label"] == "Camera Sensor"
    assert camera["parents"] == [SENSOR + "Sensor"]
    properties = {p["curie"]: p for p in body["properties"]}
    assert properties["tp:has_uri"]["kind"] == "datatype"
    assert properties["tp:hasCameraResource"]["domains"] == [SENSOR + "CameraSensor"]


# -- graph editing --------------------------------------------------------------------


def test_state_without_ontology_has_no_sparql_or_diagnostics(client, session):
    client.post(
        f"/api/sessions/{session}/graph/nodes", json={"kind": "variable", "payload": "?x"}
    )
    state = client.get(f"/api/sessions/{session}/graph").json()
    assert state["diagnostics"] == []
    assert "sparql" not in state
    assert state["graph"]["nodes"] == [{"id": 1, "kind": "variable", "payload": "?x"}]


def test_sparql_appears_once_the_graph_validates(client, session):
    build_experiment1(client, session)
    state = client.get(f"/api/sessions/{session}/graph").json()
    assert state["diagnostics"] == []
    assert state["sparql"] == GOLDEN_RQ
    assert state["graph"]["edges"] == [
        {"from": 1, "to": 2, "predicate": "tp:hasCameraResource"}
    ]
    assert state["graph"]["selected"] == ["?image"]


def test_interim_states_carry_diagnostics_not_sparql(client, session):
    upload_ontology(client, session)
    body = client.post(
        f"/api/sessions/{session}/graph/nodes", json={"kind": "variable", "payload": "?x"}
    ).json()
    codes = {d["code"] for d in body["diagnostics"]}
    assert "NO_EDGES" in codes
    assert "sparql" not in body


@pytest.mark.parametrize(
    "payload,status,code",
    [
        ({"kind": "mystery", "payload": "?x"}, 422, "BAD_PAYLOAD"),
        ({"kind": "variable", "payload": "x"}, 422, "BAD_VARIABLE_NAME"),
        ({"kind": "class", "payload": "two words"}, 422, "BAD_PAYLOAD"),
    ],
)
def test_add_node_rejections(client, session, payload, status, code):
    response = client.post(f"/api/sessions/{session}/graph/nodes", json=payload)
    assert response.status_code == status
    assert response.json()["error"]["code"] == code


def test_add_edge_rejections(client, session):
    client.post(f"/api/sessions/{session}/graph/nodes", json={"kind": "variable", "payload": "?x"})
    response = client.post(
        f"/api/sessions/{session}/graph/edges", json={"from": 1, "to": 9, "predicate": "tp:p"}
    )
    assert (response.status_code, response.json()["error"]["code"]) == (404, "UNKNOWN_NODE")
    response = client.post(
        f"/api/sessions/{session}/graph/edges", json={"from": 1, "to": 1, "predicate": "tp:p"}
    )
    assert (response.status_code, response.json()["error"]["code"]) == (422, "SELF_LOOP")


def test_remove_endpoints(client, session):
    build_experiment1(client, session)
    response = client.delete(f"/api/sessions/{session}/graph/edges/5")
    assert (response.status_code, response.json()["error"]["code"]) == (404, "UNKNOWN_EDGE")
    state = client.delete(f"/api/sessions/{session}/graph/nodes/2").json()
    assert state["graph"]["edges"] == []
    assert state["graph"]["selected"] == []


def test_selected_rejects_unknown_variables(client, session):
    response = client.put(f"/api/sessions/{session}/graph/selected", json={"selected": ["?nope"]})
    assert (response.status_code, response.json()["error"]["code"]) == (422, "UNKNOWN_VARIABLE")


def test_clear_resets_the_graph(client, session):
    build_experiment1(client, session)
    state = client.post(f"/api/sessions/{session}/graph/clear").json()
    assert state["graph"]["nodes"] == []
    assert state["graph"]["question"] == ""


def test_node_cap_guards_the_thirteenth_node(client, session):
    for i in range(12):
        response = client.post(
            f"/api/sessions/{session}/graph/nodes", json={"kind": "literal", "payload": str(i)}
        )
        assert response.status_code == 200
    rejected = client.post(
        f"/api/sessions/{session}/graph/nodes", json={"kind": "literal", "payload": "13"}
    )
    assert rejected.status_code == 409
    assert rejected.json()["error"]["code"] == "CAP_EXCEEDED"
    state = client.get(f"/api/sessions/{session}/graph").json()
    assert len(state["graph"]["nodes"]) == 12


# -- execution ---------------------------------------------------------------------------


def test_execute_requires_an_ontology(client, session):
    response = client.post(f"/api/sessions/{session}/execute")
    assert (response.status_code, response.json()["error"]["code"]) == (409, "ONTOLOGY_MISSING")


def test_execute_rejects_invalid_graphs(client, session):
    upload_ontology(client, session)
    response = client.post(f"/api/sessions/{session}/execute")
    assert response.status_code == 422
    body = response.json()["error"]
    assert body["code"] == "VALIDATION_FAILED"
    assert {d["code"] for d in body["diagnostics"]} >= {"NO_EDGES", "EMPTY_SELECTION"}


def test_execute_experiment1(client, session):
    build_experiment1(client, session)
    body = client.post(f"/api/sessions/{session}/execute").json()
    assert body["sparql"] == GOLDEN_RQ
    assert body["vars"] == ["image"]
    assert body["rows"] == [
        [{"kind": "iri", "value": SENSOR + "img42", "text": "tp:img42"}]
    ]


# -- documents ---------------------------------------------------------------------------


def test_document_download_requires_content(client, session):
    response = client.get(f"/api/sessions/{session}/document")
    assert (response.status_code, response.json()["error"]["code"]) == (409, "EMPTY_GRAPH")


def test_document_download_matches_the_fixture(client, session):
    build_experiment1(client, session)
    response = client.get(f"/api/sessions/{session}/document")
    assert response.status_code == 200
    assert response.headers["content-disposition"] == 'attachment; filename="query.oqb"'
    assert response.content == fixtures.read_fixture("experiment1.oqb")


def test_document_upload_round_trip(client, session):
    upload_ontology(client, session)
    response = client.put(
        f"/api/sessions/{session}/document", content=fixtures.read_fixture("experiment1.oqb")
    )
    assert response.status_code == 200
    state = response.json()
    assert state["diagnostics"] == []
    assert state["sparql"] == GOLDEN_RQ
    assert [n["payload"] for n in state["graph"]["nodes"]] == ["?x", "?image"]


def test_document_upload_flags_stale_sparql(client, session):
    upload_ontology(client, session)
    # tamper only the recorded SPARQL so it no longer matches the derivation
    stale = fixtures.read_fixture("experiment1.oqb").replace(
        b"sparql: SELECT ?image", b"sparql: SELECT ?renamed"
    )
    response = client.put(f"/api/sessions/{session}/document", content=stale)
    assert response.status_code == 200
    codes = [d["code"] for d in response.json()["diagnostics"]]
    assert codes[0] == "STALE_SPARQL"


def test_document_upload_rejects_garbage(client, session):
    response = client.put(f"/api/sessions/{session}/document", content=b"nonsense")
    assert response.status_code == 422
    assert response.json()["error"]["code"] == "FORMAT_ERROR"


def test_document_upload_respects_the_session_cap(data):
    client = TestClient(create_app(data, default_node_cap=1))
    session = client.post("/api/sessions").json()["id"]
    response = client.put(
        f"/api/sessions/{session}/document", content=fixtures.read_fixture("experiment1.oqb")
    )
    assert (response.status_code, response.json()["error"]["code"]) == (409, "CAP_EXCEEDED")


def test_document_upload_rebinds_to_the_session_cap(data):
    client = TestClient(create_app(data, default_node_cap=20))
    session = client.post("/api/sessions").json()["id"]
    response = client.put(
        f"/api/sessions/{session}/document", content=fixtures.read_fixture("experiment1.oqb")
    )
    assert response.json()["graph"]["node_cap"] == 20
