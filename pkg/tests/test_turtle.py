import time

import pytest
from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st
from rdflib import BNode, Graph, Literal, URIRef
from rdflib.namespace import RDF

from benchmark.generator import Variable, WorkloadSpec, generate_policies
from conftest import ALL_FIXTURES, fixture_graph, fixture_text
from rdf.errors import RelativeIriError, TurtleSyntaxError, UndefinedPrefixError
from rdf.namespaces import DTOU
from rdf.turtle import (
    graphs_isomorphic,
    list_nodes,
    match,
    merge_graphs,
    parse_turtle,
    read_list,
    serialize_turtle,
    stable_bnode,
    write_list,
)


def test_parse_attribute_listing():
    graph = parse_turtle(':attr1 a :Attribute; :name :alice-email; :class :string; :value "alice@a.b".')
    assert len(graph) == 4
    assert set(graph.subjects()) == {DTOU["attr1"]}
    assert (DTOU["attr1"], RDF.type, DTOU.Attribute) in graph
    assert (DTOU["attr1"], DTOU["class"], DTOU.string) in graph
    assert (DTOU["attr1"], DTOU.value, Literal("alice@a.b")) in graph


@pytest.mark.parametrize("name", ALL_FIXTURES)
def test_fixture_round_trip(name):
    graph = fixture_graph(name)
    assert len(graph) > 0
    assert graphs_isomorphic(parse_turtle(serialize_turtle(graph)), graph)


def test_match_attributes_of_payment_info(payment_graph):
    subjects = {s for s, _, _ in match(payment_graph, None, RDF.type, DTOU.Attribute)}
    assert subjects == {DTOU["attr-tag2"], DTOU["attr-tag3"], DTOU["attr-tag4"], DTOU["attr2"]}


def test_match_wildcards():
    graph = parse_turtle(":a :p :b. :a :q :c. :d :p :b.")
    assert len(match(graph)) == 3
    assert len(match(graph, DTOU.a)) == 2
    assert len(match(graph, None, DTOU.p, DTOU.b)) == 2


def test_syntax_error_reports_position():
    with pytest.raises(TurtleSyntaxError) as excinfo:
        parse_turtle(":a :p :b.\n:c :p .")
    assert excinfo.value.line == 2


def test_undefined_prefix():
    with pytest.raises(UndefinedPrefixError):
        parse_turtle("foo:a :p :b.")


def test_relative_iri_needs_base():
    with pytest.raises(RelativeIriError):
        parse_turtle("<thing> :p :b.")
    graph = parse_turtle("<thing> :p :b.", base="http://example.org/")
    assert (URIRef("http://example.org/thing"), DTOU.p, DTOU.b) in graph


def test_documents_may_redeclare_the_vocabulary_prefix():
    graph = parse_turtle("@prefix : <http://example.org/v#> .\n:a :p :b.")
    assert (URIRef("http://example.org/v#a"), URIRef("http://example.org/v#p"), URIRef("http://example.org/v#b")) in graph


def test_blank_node_labels_follow_the_document():
    text = fixture_text("happyshop-app.ttl")
    first = set(parse_turtle(text))
    second = set(parse_turtle(text))
    assert first == second
    assert serialize_turtle(parse_turtle(text)) == serialize_turtle(parse_turtle(text))

    graph = parse_turtle(":a :p [ :q :x ]. :b :p [ :q :y ].")
    assert graph.value(DTOU.a, DTOU.p) == BNode("b0")
    assert graph.value(DTOU.b, DTOU.p) == BNode("b1")


@pytest.mark.parametrize("text", [":app a :AppPolicy", ":a :p", ":a :p \"unterminated", ":a :p (:b :c"])
def test_truncated_documents_are_syntax_errors(text):
    with pytest.raises(TurtleSyntaxError) as excinfo:
        parse_turtle(text)
    assert excinfo.value.line == 1
    assert "@prefix" not in str(excinfo.value)


def test_large_documents_parse_quickly():
    spec = WorkloadSpec(variable=Variable.DATA_NUM_PROHIBITION)
    data_graphs, _, _ = generate_policies(spec, 1000)
    text = serialize_turtle(data_graphs[0])
    start = time.perf_counter()
    graph = parse_turtle(text)
    assert time.perf_counter() - start < 15
    assert len(graph) == len(data_graphs[0])


def test_empty_graph_serializes_prefixes_only():
    text = serialize_turtle(Graph())
    assert "@prefix : <" in text
    assert len(parse_turtle(text)) == 0


def test_collections():
    graph = Graph()
    items = [DTOU.a, DTOU.b, Literal("c")]
    head = write_list(graph, items, "seed")
    assert read_list(graph, head).items == tuple(items)
    assert write_list(graph, [], "other") == RDF.nil
    assert read_list(graph, RDF.nil).items == ()


def test_serialized_collection_keeps_its_order():
    graph = Graph()
    items = [DTOU.third, DTOU.first, Literal("second")]
    graph.add((DTOU.ob1, DTOU.args, write_list(graph, items, "ob1")))

    reparsed = parse_turtle(serialize_turtle(graph))
    assert read_list(reparsed, reparsed.value(DTOU.ob1, DTOU.args)).items == tuple(items)
    assert graphs_isomorphic(reparsed, graph)


def _two_tags(first: BNode, second: BNode, shared_descriptor: bool = False) -> Graph:
    graph = Graph()
    graph.add((DTOU.policy, DTOU.tag, first))
    graph.add((DTOU.policy, DTOU.tag, second))
    graph.add((first, DTOU.descriptor, DTOU["full-address"]))
    graph.add((second, DTOU.descriptor, DTOU["full-address"] if shared_descriptor else DTOU["postcode"]))
    graph.add((first, DTOU.scope, second))
    return graph


def test_isomorphism_ignores_blank_node_labels():
    original = _two_tags(BNode("x"), BNode("y"))
    permuted = _two_tags(BNode("y"), BNode("x"))
    renamed = _two_tags(BNode("t1"), BNode("t2"))
    assert graphs_isomorphic(original, permuted)
    assert graphs_isomorphic(original, renamed)


def test_isomorphism_detects_structural_changes():
    original = _two_tags(BNode("x"), BNode("y"))
    assert not graphs_isomorphic(original, _two_tags(BNode("x"), BNode("y"), shared_descriptor=True))

    reversed_scope = _two_tags(BNode("x"), BNode("y"))
    reversed_scope.remove((BNode("x"), DTOU.scope, BNode("y")))
    reversed_scope.add((BNode("y"), DTOU.scope, BNode("x")))
    assert not graphs_isomorphic(original, reversed_scope)


def test_read_list_rejects_non_collections():
    graph = parse_turtle(":a :p :b.")
    with pytest.raises(ValueError):
        read_list(graph, DTOU.a)


def test_list_nodes_of_shoe_size():
    lists = list_nodes(fixture_graph("shoe-size.ttl"))
    assert [found.items for found in lists] == [(DTOU["attr1"],)]


def test_merge_keeps_documents_blank_nodes_apart():
    first = parse_turtle(":a :p [ :q 1 ].")
    second = parse_turtle(":a :p [ :q 1 ].")
    merged = merge_graphs([first, second])
    assert len({o for o in merged.objects(DTOU.a, DTOU.p) if isinstance(o, BNode)}) == 2


def test_stable_bnode():
    assert stable_bnode("x", 1) == stable_bnode("x", 1)
    assert stable_bnode("x", 1) != stable_bnode("x", 2)


@given(seed=st.integers(min_value=0, max_value=2**32), size=st.integers(min_value=0, max_value=4))
@settings(max_examples=500, deadline=None, suppress_health_check=[HealthCheck.too_slow])
def test_generated_graphs_round_trip(seed, size):
    spec = WorkloadSpec(
        variable=Variable.DATA_NUM_ATTRIBUTES,
        fixed_defaults={variable: 2 for variable in Variable},
        seed=seed,
    )
    data_graphs, app_graph, context_graph = generate_policies(spec, size)
    for graph in [*data_graphs, app_graph, context_graph]:
        assert graphs_isomorphic(parse_turtle(serialize_turtle(graph)), graph)
