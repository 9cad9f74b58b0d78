import logging

import pytest
from rdflib.namespace import RDFS

from conftest import fixture_text, happyshop_kb
from rdf.namespaces import DTOU
from rdf.turtle import parse_turtle
from reasoner.closure import rdfs_closure, superclass_table
from reasoner.conformance import check_conformance
from reasoner.models import ConflictKind

RETAIL_APP = fixture_text("happyshop-app.ttl").replace(":security :banking;", ":security :retail-banking;")
VOCABULARY = parse_turtle(":retail-banking rdfs:subClassOf :banking.")


def test_subclass_satisfies_requirement_with_closure():
    kb = happyshop_kb(RETAIL_APP, vocabulary=VOCABULARY, rdfs_closure=True)
    assert check_conformance(kb) == []


def test_subclass_does_not_count_without_closure():
    kb = happyshop_kb(RETAIL_APP, vocabulary=VOCABULARY)
    (conflict,) = check_conformance(kb)
    assert conflict.kind is ConflictKind.UNSATISFIED_REQUIREMENT
    assert conflict.descriptor == DTOU.banking


def test_superclass_does_not_satisfy_subclass():
    kb = happyshop_kb(
        RETAIL_APP, vocabulary=parse_turtle(":banking rdfs:subClassOf :retail-banking."), rdfs_closure=True,
    )
    assert len(check_conformance(kb)) == 1


def test_closure_without_subclass_triples_is_identity(payment_graph):
    closed = rdfs_closure(payment_graph)
    assert set(closed) == set(payment_graph)


def test_chain_is_materialized():
    closed = rdfs_closure(parse_turtle(":a rdfs:subClassOf :b. :b rdfs:subClassOf :c."))
    assert (DTOU.a, RDFS.subClassOf, DTOU.c) in closed
    assert len(closed) == 3


def test_cycle_members_are_equivalent(caplog):
    with caplog.at_level(logging.WARNING):
        table = superclass_table(parse_turtle(":a rdfs:subClassOf :b. :b rdfs:subClassOf :a."))
    assert table[DTOU.a] == table[DTOU.b] == {DTOU.a, DTOU.b}
    assert "cycle" in caplog.text


@pytest.mark.parametrize("reverse_order", [False, True])
def test_closure_matching_is_order_independent(reverse_order):
    kb = happyshop_kb(RETAIL_APP, vocabulary=VOCABULARY, rdfs_closure=True)
    assert check_conformance(kb, reverse_order=reverse_order) == []
