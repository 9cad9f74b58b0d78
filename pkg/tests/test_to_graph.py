from rdflib import Literal, URIRef
from rdflib.namespace import RDF

from conftest import fixture_graph
from policy.extract import extract_app_policy, extract_data_policies, extract_usage_context
from policy.models import ActivationCondition, Attribute, DataPolicySet, Obligation, Policy, Tag
from policy.to_graph import app_policy_to_graph, policy_to_graph, usage_context_graph
from rdf.namespaces import DTOU
from rdf.turtle import parse_turtle, serialize_turtle


def test_data_policy_survives_serialization(payment_graph):
    (original,) = extract_data_policies(payment_graph)
    text = serialize_turtle(policy_to_graph(original))
    assert extract_data_policies(parse_turtle(text)) == [original]


def test_app_policy_survives_serialization():
    original = extract_app_policy(fixture_graph("happyshop-app.ttl"))
    text = serialize_turtle(app_policy_to_graph(original))
    assert extract_app_policy(parse_turtle(text)) == original


def test_serialization_is_reproducible():
    app = extract_app_policy(fixture_graph("happyshop-app.ttl"))
    assert set(app_policy_to_graph(app)) == set(app_policy_to_graph(app))
    assert serialize_turtle(app_policy_to_graph(app)) == serialize_turtle(app_policy_to_graph(app))


def test_open_category_and_empty_args():
    attribute = Attribute(id=DTOU.a, name=DTOU.n, class_=DTOU.gdpr, value=Literal("x"))
    policy_set = DataPolicySet(
        data_node=DTOU.d,
        uri=URIRef("http://x/y"),
        policy=Policy(
            id=DTOU.p,
            attributes=(attribute,),
            tags=(Tag(id=DTOU.t, category=DTOU.Legal, attribute_ref=DTOU.a, descriptor=DTOU.gdpr),),
            obligations=(Obligation(id=DTOU.o, obligation_class=DTOU.notify,
                                    condition=ActivationCondition(user=URIRef("http://u"))),),
        ),
    )
    graph = policy_to_graph(policy_set)
    assert (DTOU.t, RDF.type, DTOU.Tag) in graph
    assert (DTOU.t, DTOU.category, DTOU.Legal) in graph
    assert (DTOU.o, DTOU.args, RDF.nil) in graph
    assert extract_data_policies(graph) == [policy_set]


def test_usage_context_graph():
    graph = usage_context_graph(URIRef("http://a.b/alice#card"), DTOU["app-policy"], "20230823")
    context = extract_usage_context(graph)
    assert context.user == URIRef("http://a.b/alice#card")
    assert context.app_policy == DTOU["app-policy"]
    assert context.time == Literal("20230823")
