"""
Policy serialization
Turns typed policies back into triples; blank nodes the model does not
carry an id for are labelled from their owner, so output is reproducible
"""
from typing import Optional, Union

from rdflib import Graph, Literal, URIRef
from rdflib.namespace import RDF

from policy.models import (
    INTEGRITY,
    PURPOSE,
    SECURITY,
    ActivationCondition,
    AppPolicy,
    Attribute,
    DataPolicySet,
    InputSpec,
    Node,
    OutputSpec,
    Policy,
    RefinementKind,
    Tag,
)
from rdf.namespaces import DTOU
from rdf.turtle import stable_bnode, write_list

# category -> (tag type, predicate linking the policy to the tag)
_TAG_FORMS = {
    SECURITY: (DTOU.SecurityTag, DTOU.security),
    INTEGRITY: (DTOU.IntegrityTag, DTOU.integrity),
    PURPOSE: (DTOU.PurposeTag, DTOU.purpose),
}


def _new_graph() -> Graph:
    graph = Graph(bind_namespaces="core")
    graph.bind("", DTOU)
    return graph


def _add_condition(graph: Graph, owner: Node, condition: ActivationCondition) -> None:
    node = stable_bnode(owner, "activation_condition")
    graph.add((owner, DTOU.activation_condition, node))
    for predicate, value in ((DTOU.user, condition.user), (DTOU.app_name, condition.app_name),
                             (DTOU.purpose, condition.purpose)):
        if value is not None:
            graph.add((node, predicate, value))


def _add_attribute(graph: Graph, attribute: Attribute) -> None:
    graph.add((attribute.id, RDF.type, DTOU.Attribute))
    graph.add((attribute.id, DTOU.name, attribute.name))
    graph.add((attribute.id, DTOU["class"], attribute.class_))
    graph.add((attribute.id, DTOU.value, attribute.value))


def _add_tag(graph: Graph, policy_node: Node, tag: Tag) -> None:
    tag_type, predicate = _TAG_FORMS.get(tag.category, (DTOU.Tag, DTOU.tag))
    graph.add((policy_node, predicate, tag.id))
    graph.add((tag.id, RDF.type, tag_type))
    if tag_type == DTOU.Tag:
        graph.add((tag.id, DTOU.category, tag.category))
    graph.add((tag.id, DTOU.attribute_ref, tag.attribute_ref))
    for binding in tag.validity_bindings:
        graph.add((tag.id, DTOU.validity_binding, binding))


def add_policy(graph: Graph, policy: Policy) -> None:
    """Add the triples of one :Policy node to `graph`"""
    node = policy.id
    graph.add((node, RDF.type, DTOU.Policy))
    for attribute in policy.attributes:
        graph.add((node, DTOU.attribute, attribute.id))
        _add_attribute(graph, attribute)
    for tag in policy.tags:
        _add_tag(graph, node, tag)
    for prohibition in policy.prohibitions:
        graph.add((node, DTOU.prohibition, prohibition.id))
        graph.add((prohibition.id, RDF.type, DTOU.Prohibition))
        graph.add((prohibition.id, DTOU.mode, prohibition.mode))
        _add_condition(graph, prohibition.id, prohibition.condition)
        for binding in prohibition.validity_bindings:
            graph.add((prohibition.id, DTOU.validity_binding, binding))
    for obligation in policy.obligations:
        graph.add((node, DTOU.obligation, obligation.id))
        graph.add((obligation.id, RDF.type, DTOU.Obligation))
        graph.add((obligation.id, DTOU.obligation_class, obligation.obligation_class))
        graph.add((obligation.id, DTOU.args, write_list(graph, obligation.args, obligation.id, "args")))
        _add_condition(graph, obligation.id, obligation.condition)
        for binding in obligation.validity_bindings:
            graph.add((obligation.id, DTOU.validity_binding, binding))


def policy_to_graph(policy_set: DataPolicySet, graph: Optional[Graph] = None) -> Graph:
    """
    Graph form of a data policy set

    Args:
        policy_set: Policy set to write
        graph: Graph to add to (a new one when omitted)

    Returns:
        The graph holding the :Data node, its :Policy and every policy term
    """
    graph = _new_graph() if graph is None else graph
    graph.add((policy_set.data_node, RDF.type, DTOU.Data))
    graph.add((policy_set.data_node, DTOU.uri, policy_set.uri))
    graph.add((policy_set.data_node, DTOU.policy, policy_set.policy.id))
    add_policy(graph, policy_set.policy)
    return graph


def _add_port(graph: Graph, owner: Node, predicate: URIRef, name: str, *seed: object) -> None:
    port = stable_bnode(owner, *seed)
    graph.add((owner, predicate, port))
    graph.add((port, DTOU.name, Literal(name)))


def _add_input(graph: Graph, spec: InputSpec) -> None:
    node = spec.id
    graph.add((node, RDF.type, DTOU.InputSpec))
    graph.add((node, DTOU.data, spec.data_uri))
    _add_port(graph, node, DTOU.port, spec.port_name, "port")
    for provided in spec.provides:
        if provided.category == SECURITY:
            graph.add((node, DTOU.security, provided.descriptor))
        else:
            entry = stable_bnode(node, "provide", provided.category, provided.descriptor)
            graph.add((node, DTOU.provide, entry))
            graph.add((entry, DTOU.category, provided.category))
            graph.add((entry, DTOU.descriptor, provided.descriptor))
    for expected in spec.expects:
        if expected.category == INTEGRITY:
            graph.add((node, DTOU.integrity, expected.descriptor))
        else:
            entry = stable_bnode(node, "expect", expected.category, expected.descriptor)
            graph.add((node, DTOU.expect, entry))
            graph.add((entry, DTOU.category, expected.category))
            graph.add((entry, DTOU.descriptor, expected.descriptor))
    for purpose in spec.purposes:
        graph.add((node, DTOU.purpose, purpose))
    for index, downstream in enumerate(spec.downstreams):
        entry = stable_bnode(node, "downstream", index)
        graph.add((node, DTOU.downstream, entry))
        graph.add((entry, DTOU.app_name, downstream.app_name))
        if downstream.user is not None:
            graph.add((entry, DTOU.user, downstream.user))
        if downstream.purpose is not None:
            graph.add((entry, DTOU.purpose, downstream.purpose))


def _add_output(graph: Graph, spec: OutputSpec) -> None:
    node = spec.id
    graph.add((node, RDF.type, DTOU.OutputSpec))
    _add_port(graph, node, DTOU.port, spec.port_name, "port")
    for port_name in spec.from_ports:
        _add_port(graph, node, DTOU["from"], port_name, "from", port_name)
    for refinement in spec.refinements:
        graph.add((node, DTOU.refinement, refinement.id))
        graph.add((refinement.id, RDF.type, DTOU[refinement.kind.value]))
        flt = stable_bnode(refinement.id, "filter")
        graph.add((refinement.id, DTOU.filter, flt))
        if refinement.filter.input_port is not None:
            graph.add((flt, DTOU.input, Literal(refinement.filter.input_port)))
        for predicate, value in ((DTOU.name, refinement.filter.name), (DTOU["class"], refinement.filter.class_),
                                 (DTOU.value, refinement.filter.value)):
            if value is not None:
                graph.add((flt, predicate, value))
        if refinement.kind is RefinementKind.EDIT:
            graph.add((refinement.id, DTOU.new_class, refinement.new_class))
            graph.add((refinement.id, DTOU.new_value, refinement.new_value))


def app_policy_to_graph(app: AppPolicy, graph: Optional[Graph] = None) -> Graph:
    """Graph form of an app policy, inputs and outputs included"""
    graph = _new_graph() if graph is None else graph
    graph.add((app.id, RDF.type, DTOU.AppPolicy))
    graph.add((app.id, DTOU.name, app.name))
    for spec in app.inputs:
        graph.add((app.id, DTOU.input_spec, spec.id))
        _add_input(graph, spec)
    for spec in app.outputs:
        graph.add((app.id, DTOU.output_spec, spec.id))
        _add_output(graph, spec)
    return graph


def usage_context_graph(user: URIRef, app_policy: Node, time: Union[str, Literal]) -> Graph:
    """
    Build the :UsageContext of one request

    Args:
        user: WebID of the data user
        app_policy: Node of the registered app policy
        time: Time of use, carried as a literal

    Returns:
        Graph with a single :UsageContext pointing at an :AppInfo node
    """
    time = time if isinstance(time, Literal) else Literal(time)
    graph = _new_graph()
    context = stable_bnode("usage_context", user, app_policy, time)
    app_info = stable_bnode(context, "app")
    graph.add((context, RDF.type, DTOU.UsageContext))
    graph.add((context, DTOU.user, user))
    graph.add((context, DTOU.app, app_info))
    graph.add((context, DTOU.time, time))
    graph.add((app_info, RDF.type, DTOU.AppInfo))
    graph.add((app_info, DTOU.policy, app_policy))
    return graph


__all__ = ["add_policy", "app_policy_to_graph", "policy_to_graph", "usage_context_graph"]
