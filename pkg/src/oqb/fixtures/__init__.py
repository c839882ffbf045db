"""Bundled test corpus: sensor ontology, registry, experiment documents.

The files are checked in; the builders here reconstruct the experiment
documents programmatically so :func:`verify_fixtures` can prove the corpus
internally consistent (documents match their builders byte-exactly, golden
SPARQL matches the translator, golden tables match execution).
"""

from __future__ import annotations

from pathlib import Path

from ..graph import NodeKind, QueryGraph
from ..ontology import Ontology, parse_ontology
from ..persistence import QueryDocument, dumps, loads
from ..sparql import parse_sparql, serialize, translate
from ..store import TripleStore, evaluate, format_table, load_ntriples

_ROOT = Path(__file__).parent

SENSOR_OWL = "sensor.owl"
REGISTRY_NT = "registry.nt"
EXPERIMENTS = ("experiment1", "experiment2", "alarm")


def fixture_path(name: str) -> Path:
    return _ROOT / name


def read_fixture(name: str) -> bytes:
    return fixture_path(name).read_bytes()


def sensor_ontology() -> Ontology:
    return parse_ontology(read_fixture(SENSOR_OWL), source_name=SENSOR_OWL)


def registry() -> TripleStore:
    return load_ntriples(read_fixture(REGISTRY_NT))


def load_experiment(name: str) -> QueryDocument:
    return loads(read_fixture(f"{name}.oqb").decode("utf-8"))


def experiment1_document() -> QueryDocument:
    """Find the Image from the Camera Sensor."""
    graph = QueryGraph()
    x = graph.add_node(NodeKind.VARIABLE, "?x")
    image = graph.add_node(NodeKind.VARIABLE, "?image")
    graph.add_edge(x, image, "tp:hasCameraResource")
    graph.set_selected(["?image"])
    graph.set_question("Find the Image from the Camera Sensor")
    return _document(graph)


def experiment2_document() -> QueryDocument:
    """Location of the camera sensor plus the image and video it serves."""
    graph = QueryGraph()
    x = graph.add_node(NodeKind.VARIABLE, "?x")
    location = graph.add_node(NodeKind.VARIABLE, "?Location")
    image = graph.add_node(NodeKind.VARIABLE, "?Image")
    video = graph.add_node(NodeKind.VARIABLE, "?Video")
    graph.add_edge(x, location, "tp:hasLocation")
    graph.add_edge(x, image, "tp:hasResourceType")
    graph.add_edge(x, video, "tp:hasResourceType")
    graph.set_selected(["?Location", "?Image", "?Video"])
    graph.set_question(
        "I want to know the location of camera sensor and image, video from camera sensor"
    )
    return _document(graph)


def alarm_document() -> QueryDocument:
    """Image URL from the room whose motion detector reports a detection."""
    graph = QueryGraph()
    x = graph.add_node(NodeKind.VARIABLE, "?x")
    y = graph.add_node(NodeKind.VARIABLE, "?y")
    image = graph.add_node(NodeKind.VARIABLE, "?image")
    room = graph.add_node(NodeKind.VARIABLE, "?room")
    z = graph.add_node(NodeKind.VARIABLE, "?z")
    detected = graph.add_node(NodeKind.LITERAL, "true")
    graph.add_edge(x, y, "tp:has_uri")
    graph.add_edge(x, image, "tp:has_resource")
    graph.add_edge(x, room, "tp:has_location")
    graph.add_edge(z, room, "tp:has_location")
    graph.add_edge(z, detected, "tp:get_detection")
    graph.set_selected(["?y"])
    graph.set_question("I want image from room when someone enter the room")
    return _document(graph)


def _document(graph: QueryGraph) -> QueryDocument:
    sparql = serialize(translate(graph, sensor_ontology()))
    return QueryDocument(
        question=graph.question,
        ontology_source=SENSOR_OWL,
        graph=graph,
        sparql=sparql,
    )


_BUILDERS = {
    "experiment1": experiment1_document,
    "experiment2": experiment2_document,
    "alarm": alarm_document,
}


def verify_fixtures() -> list[str]:
    """Check every corpus invariant; returns the violations (empty when sound)."""
    problems: list[str] = []

    catalog = sensor_ontology()
    for diag in catalog.diagnostics:
        if diag.is_error:
            problems.append(f"{SENSOR_OWL}: error diagnostic {diag.code}: {diag.message}")

    data = registry()

    for name in EXPERIMENTS:
        built = _BUILDERS[name]()
        stored_bytes = read_fixture(f"{name}.oqb")
        if dumps(built).encode("utf-8") != stored_bytes:
            problems.append(f"{name}.oqb does not match its builder output")
            continue

        document = load_experiment(name)
        query = translate(document.graph, catalog)
        sparql_text = serialize(query)

        golden_rq = read_fixture(f"golden/{name}.rq").decode("utf-8")
        if sparql_text != golden_rq:
            problems.append(f"golden/{name}.rq does not match the translation")
        if document.sparql != golden_rq:
            problems.append(f"{name}.oqb stored SPARQL is stale")
        try:
            parse_sparql(golden_rq)
        except Exception as exc:
            problems.append(f"golden/{name}.rq does not parse: {exc}")

        table = evaluate(query, data)
        golden_tsv = read_fixture(f"golden/{name}.tsv").decode("utf-8")
        if format_table(table, query.prefixes) != golden_tsv:
            problems.append(f"golden/{name}.tsv does not match execution output")

    return problems
