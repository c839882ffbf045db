from __future__ import annotations

import pytest

from oqb.errors import Severity
from oqb.graph import (
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


def two_node_graph() -> tuple[QueryGraph, int, int]:
    graph = QueryGraph()
    x = graph.add_node(NodeKind.VARIABLE, "?x")
    y = graph.add_node(NodeKind.VARIABLE, "?y")
    return graph, x, y


# -- construction and mutation --------------------------------------------------


def test_node_ids_are_monotonic():
    graph, x, y = two_node_graph()
    assert (x, y) == (1, 2)
    graph.remove_node(y)
    assert graph.add_node(NodeKind.LITERAL, "true") == 3  # ids are never reused


def test_clear_restarts_ids_and_keeps_cap():
    graph = QueryGraph(node_cap=5)
    graph.add_node(NodeKind.VARIABLE, "?x")
    graph.set_question("anything")
    graph.clear()
    assert graph.nodes == {} and graph.edges == [] and graph.selected == []
    assert graph.question == ""
    assert graph.node_cap == 5
    assert graph.add_node(NodeKind.VARIABLE, "?x") == 1


def test_node_cap_is_enforced_transactionally():
    graph = QueryGraph(node_cap=1)
    graph.add_node(NodeKind.VARIABLE, "?x")
    before = graph.copy()
    with pytest.raises(CapExceeded):
        graph.add_node(NodeKind.VARIABLE, "?y")
    assert graph == before
    assert graph._next_id == before._next_id  # the failed add burned no id


def test_invalid_cap_rejected():
    with pytest.raises(ValueError):
        QueryGraph(node_cap=0)


@pytest.mark.parametrize("payload", ["x", "?", "?9x", "? x", "image"])
def test_variable_payload_must_carry_sigil(payload):
    graph = QueryGraph()
    with pytest.raises(BadVariableName):
        graph.add_node(NodeKind.VARIABLE, payload)
    assert graph.nodes == {}


def test_class_payload_must_be_compact():
    graph = QueryGraph()
    with pytest.raises(BadPayload):
        graph.add_node(NodeKind.CLASS_TERM, "two words")
    with pytest.raises(BadPayload):
        graph.add_node(NodeKind.CLASS_TERM, "")
    assert graph.add_node(NodeKind.CLASS_TERM, "tp:CameraSensor") == 1


def test_literal_payload_is_unrestricted():
    graph = QueryGraph()
    assert graph.add_node(NodeKind.LITERAL, "") == 1
    assert graph.add_node(NodeKind.LITERAL, "two words, a \"quote\"") == 2


def test_add_edge_checks_endpoints():
    graph, x, y = two_node_graph()
    with pytest.raises(UnknownNode):
        graph.add_edge(x, 99, "tp:p")
    with pytest.raises(SelfLoop):
        graph.add_edge(x, x, "tp:p")
    with pytest.raises(BadPayload):
        graph.add_edge(x, y, "two words")
    with pytest.raises(BadPayload):
        graph.add_edge(x, y, "")
    assert graph.edges == []
    assert graph.add_edge(x, y, "tp:p") == 0


def test_remove_node_cascades():
    graph, x, y = two_node_graph()
    z = graph.add_node(NodeKind.VARIABLE, "?z")
    graph.add_edge(x, y, "tp:p")
    graph.add_edge(y, z, "tp:q")
    graph.set_selected(["?y", "?z"])
    graph.remove_node(y)
    assert set(graph.nodes) == {x, z}
    assert graph.edges == []
    assert graph.selected == ["?z"]


def test_remove_node_keeps_selection_while_a_twin_lives():
    graph = QueryGraph()
    a = graph.add_node(NodeKind.VARIABLE, "?x")
    b = graph.add_node(NodeKind.VARIABLE, "?x")  # same payload, distinct node
    graph.add_node(NodeKind.VARIABLE, "?y")
    graph.set_selected(["?x"])
    graph.remove_node(a)
    assert graph.selected == ["?x"]
    graph.remove_node(b)
    assert graph.selected == []


def test_remove_edge_bounds():
    graph, x, y = two_node_graph()
    graph.add_edge(x, y, "tp:p")
    with pytest.raises(UnknownEdge):
        graph.remove_edge(1)
    with pytest.raises(UnknownEdge):
        graph.remove_edge(-1)
    graph.remove_edge(0)
    assert graph.edges == []


def test_set_selected_replaces_wholesale():
    graph, x, y = two_node_graph()
    graph.set_selected(["?y", "?x"])
    assert graph.selected == ["?y", "?x"]
    with pytest.raises(UnknownVariable):
        graph.set_selected(["?ghost"])
    assert graph.selected == ["?y", "?x"]  # failed call changed nothing
    graph.set_selected([])
    assert graph.selected == []


def test_copy_is_independent():
    graph, x, y = two_node_graph()
    graph.add_edge(x, y, "tp:p")
    clone = graph.copy()
    clone.add_node(NodeKind.LITERAL, "true")
    clone.remove_edge(0)
    assert len(graph.nodes) == 2
    assert len(graph.edges) == 1
    assert graph != clone


def test_restore_round_trip_semantics():
    restored = QueryGraph._restore(
        node_cap=12,
        nodes=[(2, NodeKind.VARIABLE, "?x"), (7, NodeKind.LITERAL, "true")],
        edges=[(2, 7, "tp:p")],
        selected=["?x"],
        question="q",
    )
    assert set(restored.nodes) == {2, 7}
    assert restored.add_node(NodeKind.VARIABLE, "?new") == 8  # next id follows the max


@pytest.mark.parametrize(
    "nodes,edges,selected",
    [
        ([(1, NodeKind.VARIABLE, "?x"), (1, NodeKind.VARIABLE, "?y")], [], []),  # dup id
        ([(0, NodeKind.VARIABLE, "?x")], [], []),  # non-positive id
        ([(1, NodeKind.VARIABLE, "x")], [], []),  # payload without sigil
        ([(1, NodeKind.VARIABLE, "?x")], [(1, 2, "tp:p")], []),  # edge to nowhere
        ([(1, NodeKind.VARIABLE, "?x")], [], ["?ghost"]),  # unknown selection
    ],
)
def test_restore_rejects_invariant_violations(nodes, edges, selected):
    with pytest.raises(ValueError):
        QueryGraph._restore(node_cap=12, nodes=nodes, edges=edges, selected=selected, question="")


def test_restore_rejects_cap_overflow():
    nodes = [(i, NodeKind.LITERAL, "x") for i in range(1, 4)]
    with pytest.raises(ValueError):
        QueryGraph._restore(node_cap=2, nodes=nodes, edges=[], selected=[], question="")


# -- validation -----------------------------------------------------------------


def codes(diagnostics, severity=None):
    if severity is None:
        return {d.code for d in diagnostics}
    return {d.code for d in diagnostics if d.severity is severity}


def test_validate_empty_graph(catalog):
    diags = validate(QueryGraph(), catalog)
    assert codes(diags, Severity.ERROR) == {"NO_EDGES", "EMPTY_SELECTION"}


def test_validate_accepts_experiment_shape(catalog):
    graph, x, y = two_node_graph()
    graph.add_edge(x, y, "tp:hasCameraResource")
    graph.set_selected(["?y"])
    assert validate(graph, catalog) == []


def test_validate_unused_variable(catalog):
    graph, x, y = two_node_graph()
    graph.add_node(NodeKind.VARIABLE, "?lonely")
    graph.add_edge(x, y, "tp:hasCameraResource")
    graph.set_selected(["?y"])
    diags = validate(graph, catalog)
    assert codes(diags) == {"UNUSED_VARIABLE"}
    assert all(d.severity is Severity.ERROR for d in diags)


def test_validate_literal_subject(catalog):
    graph = QueryGraph()
    lit = graph.add_node(NodeKind.LITERAL, "true")
    y = graph.add_node(NodeKind.VARIABLE, "?y")
    graph.add_edge(lit, y, "tp:get_detection")
    graph.set_selected(["?y"])
    assert "LITERAL_SUBJECT" in codes(validate(graph, catalog), Severity.ERROR)


def test_validate_unknown_names_strict_vs_lax(catalog):
    graph = QueryGraph()
    c = graph.add_node(NodeKind.CLASS_TERM, "tp:NoSuchClass")
    y = graph.add_node(NodeKind.VARIABLE, "?y")
    graph.add_edge(c, y, "tp:noSuchProperty")
    graph.set_selected(["?y"])

    strict = validate(graph, catalog, strict=True)
    assert codes(strict, Severity.ERROR) == {"UNKNOWN_CLASS", "UNKNOWN_PROPERTY"}

    lax = validate(graph, catalog, strict=False)
    assert codes(lax, Severity.WARNING) == {"UNKNOWN_CLASS", "UNKNOWN_PROPERTY"}
    assert codes(lax, Severity.ERROR) == set()


def test_validate_unknown_prefix(catalog):
    graph = QueryGraph()
    c = graph.add_node(NodeKind.CLASS_TERM, "zz:Thing")
    y = graph.add_node(NodeKind.VARIABLE, "?y")
    graph.add_edge(c, y, "zz:prop")
    graph.set_selected(["?y"])
    diags = validate(graph, catalog)
    assert [d.code for d in diags] == ["UNKNOWN_PREFIX", "UNKNOWN_PREFIX"]
    kinds = {(d.subject_kind, d.subject) for d in diags}
    assert kinds == {("node", c), ("edge", 0)}


def test_validate_domain_mismatch_respects_subclassing(catalog):
    graph = QueryGraph()
    camera = graph.add_node(NodeKind.CLASS_TERM, "tp:CameraSensor")
    room = graph.add_node(NodeKind.CLASS_TERM, "tp:Room")
    where = graph.add_node(NodeKind.VARIABLE, "?where")
    # CameraSensor is a Sensor, so hasLocation's Sensor domain is satisfied
    graph.add_edge(camera, where, "tp:hasLocation")
    graph.set_selected(["?where"])
    assert validate(graph, catalog) == []

    graph.add_edge(room, where, "tp:hasLocation")  # Room is no Sensor
    diags = validate(graph, catalog)
    assert codes(diags) == {"DOMAIN_MISMATCH"}
    assert all(d.severity is Severity.WARNING for d in diags)


def test_validate_range_mismatch_literal_with_object_property(catalog):
    graph = QueryGraph()
    x = graph.add_node(NodeKind.VARIABLE, "?x")
    lit = graph.add_node(NodeKind.LITERAL, "true")
    graph.add_edge(x, lit, "tp:hasLocation")
    graph.set_selected(["?x"])
    assert codes(validate(graph, catalog)) == {"RANGE_MISMATCH"}


def test_validate_range_mismatch_class_with_datatype_property(catalog):
    graph = QueryGraph()
    x = graph.add_node(NodeKind.VARIABLE, "?x")
    c = graph.add_node(NodeKind.CLASS_TERM, "tp:Image")
    graph.add_edge(x, c, "tp:has_uri")
    graph.set_selected(["?x"])
    assert codes(validate(graph, catalog)) == {"RANGE_MISMATCH"}


def test_validate_range_mismatch_incompatible_class(catalog):
    graph = QueryGraph()
    x = graph.add_node(NodeKind.VARIABLE, "?x")
    room = graph.add_node(NodeKind.CLASS_TERM, "tp:Room")
    image = graph.add_node(NodeKind.CLASS_TERM, "tp:Image")
    graph.add_edge(x, room, "tp:hasCameraResource")  # range is Data
    graph.add_edge(x, image, "tp:hasCameraResource")  # Image is Data: fine
    graph.set_selected(["?x"])
    diags = validate(graph, catalog)
    assert [d.code for d in diags] == ["RANGE_MISMATCH"]
    assert diags[0].subject == 0


def test_validate_literal_object_with_datatype_property_is_clean(catalog):
    graph = QueryGraph()
    x = graph.add_node(NodeKind.VARIABLE, "?x")
    lit = graph.add_node(NodeKind.LITERAL, "true")
    graph.add_edge(x, lit, "tp:get_detection")
    graph.set_selected(["?x"])
    assert validate(graph, catalog) == []


def test_validate_orders_graph_then_nodes_then_edges(catalog):
    graph = QueryGraph()
    c = graph.add_node(NodeKind.CLASS_TERM, "tp:NoSuchClass")
    y = graph.add_node(NodeKind.VARIABLE, "?y")
    graph.add_edge(c, y, "tp:noSuchProperty")
    diags = validate(graph, catalog)
    assert [d.code for d in diags] == ["EMPTY_SELECTION", "UNKNOWN_CLASS", "UNKNOWN_PROPERTY"]


def test_validate_never_mutates(catalog):
    graph, x, y = two_node_graph()
    graph.add_edge(x, y, "zz:prop")
    before = graph.copy()
    validate(graph, catalog)
    validate(graph, catalog, strict=False)
    assert graph == before
