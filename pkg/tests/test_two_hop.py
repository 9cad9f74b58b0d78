from rdflib import URIRef

from conftest import HISTORY_URI, fixture_graph, fixture_text
from oracle import Oracle, derived_terms
from policy.models import INTEGRITY
from rdf.namespaces import DTOU
from rdf.turtle import parse_turtle
from reasoner.conformance import check_conformance
from reasoner.derivation import derive_policies, derive_policy
from reasoner.knowledge_base import assemble
from reasoner.obligations import check_obligations
from reasoner.report import derived_policy_turtle


def _purchase_history(kb) -> str:
    """HappyShop's out1 policy, stored where TotalAcc reads it"""
    return derived_policy_turtle(derive_policy(kb, "out1-port").bind(URIRef(HISTORY_URI)))


def _totalacc(history: str) -> Oracle:
    return Oracle(fixture_text("totalacc-context.ttl"), fixture_text("totalacc-app.ttl"), [history])


def test_derived_policy_governs_the_second_app(kb):
    history = _purchase_history(kb)
    second = assemble(
        fixture_graph("totalacc-context.ttl"),
        fixture_graph("totalacc-app.ttl"),
        [parse_turtle(history)],
    )
    assert second.uncovered_inputs == ()
    (pairing,) = second.pairings
    (tag,) = pairing.data.policy.tags
    assert tag.category == INTEGRITY
    assert tag.descriptor == DTOU["full-address"]
    assert check_conformance(second) == []
    assert check_obligations(second) == []


def test_second_hop_agrees_with_brute_force(kb):
    oracle = _totalacc(_purchase_history(kb))
    second = oracle.knowledge_base()
    assert check_conformance(second) == oracle.conflicts()
    assert check_obligations(second) == oracle.obligations()
    assert {d.output_port: derived_terms(d) for d in derive_policies(second)} == oracle.derivations()


def test_second_hop_redacts_the_address(kb):
    second = _totalacc(_purchase_history(kb)).knowledge_base()
    (ledger,) = derive_policies(second)
    values = {attribute.value for attribute in ledger.policy.policy.attributes}
    assert DTOU.redacted in values
    assert DTOU["postal-address"] not in values
    assert DTOU["payment-details"] not in values
