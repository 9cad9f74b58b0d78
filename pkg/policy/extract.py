"""
Policy extraction
Binds parsed graphs to validated policy objects; every malformed document
raises instead of producing a partially filled object
"""
import logging
from typing import Callable, List, Optional, Tuple, TypeVar

from pydantic import ValidationError
from rdflib import BNode, Graph, Literal, URIRef
from rdflib.namespace import RDF

from policy.errors import DanglingReferenceError, StructuralError
from policy.models import (
    INTEGRITY,
    NIL,
    PURPOSE,
    SECURITY,
    ActivationCondition,
    AppPolicy,
    Attribute,
    DataPolicySet,
    Downstream,
    Filter,
    InputSpec,
    Node,
    Obligation,
    OutputSpec,
    Policy,
    Prohibition,
    Refinement,
    RefinementKind,
    Tag,
    TagSpec,
    Term,
    UsageContext,
)
from rdf.namespaces import DTOU
from rdf.turtle import read_list

logger = logging.getLogger(__name__)

T = TypeVar("T")

# rdf:type of a tag -> category
TAG_TYPES = {
    DTOU.SecurityTag: SECURITY,
    DTOU.IntegrityTag: INTEGRITY,
    DTOU.PurposeTag: PURPOSE,
}

# Policy predicate linking a tag -> category implied by the predicate
TAG_PREDICATES = {
    DTOU.security: SECURITY,
    DTOU.integrity: INTEGRITY,
    DTOU.purpose: PURPOSE,
    DTOU.tag: None,
}


def _sorted(nodes) -> List:
    return sorted(set(nodes), key=str)


class _Reader:
    """Cardinality-checked access to one graph"""

    def __init__(self, graph: Graph):
        self.graph = graph

    def values(self, node: Node, predicate: URIRef) -> List[Term]:
        return _sorted(self.graph.objects(node, predicate))

    def optional(self, node: Node, predicate: URIRef, field: str) -> Optional[Term]:
        values = self.values(node, predicate)
        if len(values) > 1:
            raise StructuralError(node, field, f"expected at most one value, found {len(values)}")
        return values[0] if values else None

    def one(self, node: Node, predicate: URIRef, field: str) -> Term:
        value = self.optional(node, predicate, field)
        if value is None:
            raise StructuralError(node, field, "missing")
        return value

    def iri(self, node: Node, predicate: URIRef, field: str, required: bool = True) -> Optional[URIRef]:
        value = self.one(node, predicate, field) if required else self.optional(node, predicate, field)
        if value is not None and not isinstance(value, URIRef):
            raise StructuralError(node, field, f"expected an IRI, found {value!r}")
        return value

    def node(self, node: Node, predicate: URIRef, field: str) -> Node:
        value = self.one(node, predicate, field)
        if not isinstance(value, (URIRef, BNode)):
            raise StructuralError(node, field, f"expected a node, found {value!r}")
        return value

    def nodes(self, node: Node, predicate: URIRef, field: str) -> List[Node]:
        values = self.values(node, predicate)
        for value in values:
            if not isinstance(value, (URIRef, BNode)):
                raise StructuralError(node, field, f"expected a node, found {value!r}")
        return values

    def iris(self, node: Node, predicate: URIRef, field: str) -> List[URIRef]:
        values = self.values(node, predicate)
        for value in values:
            if not isinstance(value, URIRef):
                raise StructuralError(node, field, f"expected an IRI, found {value!r}")
        return values

    def port_name(self, node: Node, predicate: URIRef, field: str) -> str:
        """A port given as `[ :name "x" ]` or directly as a literal"""
        return self._port_name(node, self.one(node, predicate, field), field)

    def port_names(self, node: Node, predicate: URIRef, field: str) -> List[str]:
        return sorted({self._port_name(node, value, field) for value in self.values(node, predicate)})

    def _port_name(self, owner: Node, value: Term, field: str) -> str:
        if isinstance(value, Literal):
            return str(value)
        name = self.one(value, DTOU.name, f"{field}.name")
        if not isinstance(name, Literal):
            raise StructuralError(owner, field, f"port name must be a string literal, found {name!r}")
        return str(name)


def _build(node: Node, field: str, factory: Callable[..., T], **values) -> T:
    """Instantiate a model, turning validation failures into StructuralError"""
    try:
        return factory(**values)
    except ValidationError as e:
        message = "; ".join(error["msg"] for error in e.errors())
        raise StructuralError(node, field, message) from e


def _condition(reader: _Reader, owner: Node) -> ActivationCondition:
    node = reader.node(owner, DTOU.activation_condition, "activation_condition")
    return _build(
        owner, "activation_condition", ActivationCondition,
        user=reader.iri(node, DTOU.user, "activation_condition.user", required=False),
        app_name=reader.iri(node, DTOU.app_name, "activation_condition.app_name", required=False),
        purpose=reader.iri(node, DTOU.purpose, "activation_condition.purpose", required=False),
    )


def _bindings(reader: _Reader, owner: Node, known: set) -> frozenset:
    bindings = reader.nodes(owner, DTOU.validity_binding, "validity_binding")
    for binding in bindings:
        if binding not in known:
            raise DanglingReferenceError(owner, "validity_binding", binding, "the same policy")
    return frozenset(bindings)


def _attribute(reader: _Reader, node: Node) -> Attribute:
    return Attribute(
        id=node,
        name=reader.iri(node, DTOU.name, "name"),
        class_=reader.iri(node, DTOU["class"], "class"),
        value=reader.one(node, DTOU.value, "value"),
    )


def _tag_category(reader: _Reader, node: Node, implied: Optional[URIRef]) -> URIRef:
    typed = {TAG_TYPES[t] for t in reader.graph.objects(node, RDF.type) if t in TAG_TYPES}
    if len(typed) > 1:
        raise StructuralError(node, "rdf:type", "tag has more than one category type")
    if typed:
        return typed.pop()
    explicit = reader.iri(node, DTOU.category, "category", required=False)
    if explicit is not None:
        return explicit
    if implied is not None:
        return implied
    raise StructuralError(node, "category", "missing (no tag type, :category, or categorised predicate)")


def _policy(reader: _Reader, node: Node) -> Policy:
    attributes = [_attribute(reader, a) for a in reader.nodes(node, DTOU.attribute, "attribute")]
    index = {attribute.id: attribute for attribute in attributes}
    known = set(index)

    tags = []
    seen_tags = set()
    for predicate, implied in TAG_PREDICATES.items():
        for tag_node in reader.nodes(node, predicate, str(predicate).rsplit("#", 1)[-1]):
            if tag_node in seen_tags:
                continue
            seen_tags.add(tag_node)
            ref = reader.node(tag_node, DTOU.attribute_ref, "attribute_ref")
            if ref not in index:
                raise DanglingReferenceError(tag_node, "attribute_ref", ref, "the same policy")
            tags.append(Tag(
                id=tag_node,
                category=_tag_category(reader, tag_node, implied),
                attribute_ref=ref,
                descriptor=index[ref].class_,
                validity_bindings=_bindings(reader, tag_node, known),
            ))

    prohibitions = []
    for pro in reader.nodes(node, DTOU.prohibition, "prohibition"):
        mode = reader.iri(pro, DTOU.mode, "mode")
        prohibitions.append(_build(
            pro, "mode", Prohibition,
            id=pro, mode=mode, condition=_condition(reader, pro),
            validity_bindings=_bindings(reader, pro, known),
        ))

    obligations = []
    for obl in reader.nodes(node, DTOU.obligation, "obligation"):
        head = reader.optional(obl, DTOU.args, "args")
        args: Tuple[Node, ...] = ()
        if head is not None:
            try:
                args = tuple(read_list(reader.graph, head).items)  # type: ignore[arg-type]
            except ValueError as e:
                raise StructuralError(obl, "args", str(e)) from e
            for arg in args:
                if arg not in known:
                    raise DanglingReferenceError(obl, "args", arg, "the same policy")
        obligations.append(Obligation(
            id=obl,
            obligation_class=reader.iri(obl, DTOU.obligation_class, "obligation_class"),
            args=args,
            condition=_condition(reader, obl),
            validity_bindings=_bindings(reader, obl, known),
        ))

    return _build(
        node, "policy", Policy,
        id=node, attributes=tuple(attributes), tags=tuple(tags),
        prohibitions=tuple(prohibitions), obligations=tuple(obligations),
    )


def extract_data_policies(graph: Graph) -> List[DataPolicySet]:
    """
    Extract every :Data policy set from a graph

    Args:
        graph: Graph parsed by rdf.parse_turtle

    Returns:
        One DataPolicySet per :Data node, ordered by data IRI

    Raises:
        StructuralError: missing or repeated field, wrong kind of value
        DanglingReferenceError: reference outside the policy
    """
    reader = _Reader(graph)
    found = []
    for data in _sorted(graph.subjects(RDF.type, DTOU.Data)):
        uri = reader.iri(data, DTOU.uri, "uri")
        policy_node = reader.node(data, DTOU.policy, "policy")
        found.append(DataPolicySet(data_node=data, uri=uri, policy=_policy(reader, policy_node)))
    found.sort(key=lambda p: (str(p.uri), str(p.data_node)))
    logger.debug(f"Extracted {len(found)} data policies")
    return found


def _tag_specs(reader: _Reader, node: Node, predicate: URIRef, category: URIRef, field: str) -> List[TagSpec]:
    return [TagSpec(category=category, descriptor=d) for d in reader.iris(node, predicate, field)]


def _generic_specs(reader: _Reader, node: Node, predicate: URIRef, field: str) -> List[TagSpec]:
    specs = []
    for spec_node in reader.nodes(node, predicate, field):
        specs.append(TagSpec(
            category=reader.iri(spec_node, DTOU.category, f"{field}.category"),
            descriptor=reader.iri(spec_node, DTOU.descriptor, f"{field}.descriptor"),
        ))
    return specs


def _input(reader: _Reader, node: Node) -> InputSpec:
    downstreams = []
    for ds in reader.nodes(node, DTOU.downstream, "downstream"):
        downstreams.append(Downstream(
            app_name=reader.iri(ds, DTOU.app_name, "downstream.app_name"),
            user=reader.iri(ds, DTOU.user, "downstream.user", required=False),
            purpose=reader.iri(ds, DTOU.purpose, "downstream.purpose", required=False),
        ))
    provides = _tag_specs(reader, node, DTOU.security, SECURITY, "security")
    provides += _generic_specs(reader, node, DTOU.provide, "provide")
    expects = _tag_specs(reader, node, DTOU.integrity, INTEGRITY, "integrity")
    expects += _generic_specs(reader, node, DTOU.expect, "expect")
    downstreams.sort(key=lambda d: (str(d.app_name), str(d.user or ""), str(d.purpose or "")))
    return _build(
        node, "input_spec", InputSpec,
        id=node,
        port_name=reader.port_name(node, DTOU.port, "port"),
        data_uri=reader.iri(node, DTOU.data, "data"),
        provides=frozenset(provides),
        expects=frozenset(expects),
        purposes=frozenset(reader.iris(node, DTOU.purpose, "purpose")),
        downstreams=tuple(downstreams),
    )


def _refinement(reader: _Reader, node: Node) -> Refinement:
    types = set(reader.graph.objects(node, RDF.type))
    kinds = [kind for kind in RefinementKind if DTOU[kind.value] in types]
    if len(kinds) != 1:
        raise StructuralError(node, "rdf:type", "refinement must be exactly one of :Delete, :Edit")
    filter_node = reader.node(node, DTOU.filter, "filter")
    port_value = reader.optional(filter_node, DTOU.input, "filter.input")
    input_port = None if port_value is None else reader._port_name(node, port_value, "filter.input")
    refinement_filter = _build(
        node, "filter", Filter,
        input_port=input_port,
        name=reader.iri(filter_node, DTOU.name, "filter.name", required=False),
        class_=reader.iri(filter_node, DTOU["class"], "filter.class", required=False),
        value=reader.optional(filter_node, DTOU.value, "filter.value"),
    )
    return _build(
        node, "refinement", Refinement,
        id=node, kind=kinds[0], filter=refinement_filter,
        new_class=reader.iri(node, DTOU.new_class, "new_class", required=False),
        new_value=reader.optional(node, DTOU.new_value, "new_value"),
    )


def _output(reader: _Reader, node: Node, input_ports: set) -> OutputSpec:
    from_ports = reader.port_names(node, DTOU["from"], "from")
    for port in from_ports:
        if port not in input_ports:
            raise DanglingReferenceError(node, "from", port, "the input ports of the app policy")
    refinements = [_refinement(reader, r) for r in reader.nodes(node, DTOU.refinement, "refinement")]
    return OutputSpec(
        id=node,
        port_name=reader.port_name(node, DTOU.port, "port"),
        from_ports=tuple(from_ports),
        refinements=tuple(refinements),
    )


def extract_app_policy(graph: Graph) -> AppPolicy:
    """
    Extract the single :AppPolicy of a registration graph

    Raises:
        StructuralError: zero or several :AppPolicy nodes, or a malformed spec
        DanglingReferenceError: an output reads from an unknown input port
    """
    reader = _Reader(graph)
    apps = _sorted(graph.subjects(RDF.type, DTOU.AppPolicy))
    if len(apps) != 1:
        raise StructuralError("graph", "AppPolicy", f"expected exactly one :AppPolicy node, found {len(apps)}")
    app = apps[0]
    inputs = [_input(reader, n) for n in reader.nodes(app, DTOU.input_spec, "input_spec")]
    inputs.sort(key=lambda spec: spec.port_name)
    input_ports = {spec.port_name for spec in inputs}
    if len(input_ports) != len(inputs):
        raise StructuralError(app, "input_spec", "input port names must be distinct")
    outputs = [_output(reader, n, input_ports) for n in reader.nodes(app, DTOU.output_spec, "output_spec")]
    outputs.sort(key=lambda spec: spec.port_name)
    policy = _build(
        app, "app_policy", AppPolicy,
        id=app, name=reader.iri(app, DTOU.name, "name"), inputs=tuple(inputs), outputs=tuple(outputs),
    )
    logger.debug(f"Extracted app policy {policy.name}: {len(inputs)} inputs, {len(outputs)} outputs")
    return policy


def extract_usage_context(graph: Graph, app: Optional[AppPolicy] = None) -> UsageContext:
    """
    Extract the single :UsageContext of a graph

    The :app value is either an :AppInfo node carrying :policy, or the app
    policy node itself.

    Args:
        graph: Graph holding the context
        app: When given, the context must refer to this app policy

    Raises:
        StructuralError: zero or several contexts, or a missing user/app/time
        DanglingReferenceError: the context refers to a different app policy
    """
    reader = _Reader(graph)
    contexts = _sorted(graph.subjects(RDF.type, DTOU.UsageContext))
    if len(contexts) != 1:
        raise StructuralError("graph", "UsageContext", f"expected exactly one :UsageContext node, found {len(contexts)}")
    node = contexts[0]
    app_info = reader.node(node, DTOU.app, "app")
    policy_ref = reader.optional(app_info, DTOU.policy, "app.policy")
    if policy_ref is None:
        policy_ref = app_info
    if not isinstance(policy_ref, (URIRef, BNode)):
        raise StructuralError(node, "app.policy", f"expected a node, found {policy_ref!r}")
    if app is not None and policy_ref != app.id:
        raise DanglingReferenceError(node, "app.policy", policy_ref, "the registered app policy")
    time = reader.one(node, DTOU.time, "time")
    if not isinstance(time, Literal):
        raise StructuralError(node, "time", f"expected a literal, found {time!r}")
    return UsageContext(
        id=node,
        user=reader.iri(node, DTOU.user, "user"),
        app_policy=policy_ref,
        time=time,
    )


__all__ = ["NIL", "extract_app_policy", "extract_data_policies", "extract_usage_context"]
