"""
Policy derivation
Merges the data policies of an output's from-inputs and applies its refinements
"""
import logging
from typing import Dict, List, Optional, Tuple

from rdflib import URIRef

from policy.errors import DerivationError
from policy.models import (
    Attribute,
    DataPolicySet,
    Node,
    Obligation,
    OutputSpec,
    Policy,
    Prohibition,
    Refinement,
    RefinementKind,
    Tag,
    Term,
)
from rdf.turtle import stable_bnode
from reasoner.models import DerivedPolicy, ForwardLink, KnowledgeBase, Pairing, unbound_output_uri

logger = logging.getLogger(__name__)


def refine(attribute: Attribute, port_name: str, refinements: Tuple[Refinement, ...]) -> Optional[Tuple[URIRef, Term]]:
    """
    Outcome of the refinements for one input attribute

    Returns:
        None when a matching Delete drops the attribute, otherwise the
        (class, value) the output attribute carries: the original pair when
        no filter matches, the new pair of the matching Edit with the
        smallest node id otherwise
    """
    matching = [r for r in refinements if r.filter.matches(attribute, port_name)]
    if any(r.kind is RefinementKind.DELETE for r in matching):
        return None
    if not matching:
        return attribute.class_, attribute.value
    edit = min(matching, key=lambda r: str(r.id))
    return edit.new_class, edit.new_value


class _Derivation:
    """State for deriving one output port"""

    def __init__(self, kb: KnowledgeBase, output: OutputSpec):
        self.kb = kb
        self.output = output
        self.port = output.port_name
        self.attributes: List[Attribute] = []
        self.tags: List[Tag] = []
        self.prohibitions: List[Prohibition] = []
        self.obligations: List[Obligation] = []
        self.links: List[ForwardLink] = []

    def _node(self, kind: str, pairing: Pairing, origin: Node) -> Node:
        return stable_bnode(kind, self.port, pairing.input.port_name, pairing.data.data_node, origin)

    def add(self, pairing: Pairing) -> None:
        input_port = pairing.input.port_name
        policy = pairing.data.policy

        forward: Dict[Node, Attribute] = {}
        for attribute in policy.attributes:
            outcome = refine(attribute, input_port, self.output.refinements)
            if outcome is None:
                continue
            class_, value = outcome
            copy = Attribute(id=self._node("attribute", pairing, attribute.id),
                             name=attribute.name, class_=class_, value=value)
            forward[attribute.id] = copy
            self.attributes.append(copy)
            self.links.append(ForwardLink(
                origin=attribute.id, port=self.port, ref=copy.id,
                input_port=input_port, source=pairing.data.data_node,
            ))

        def remap(nodes) -> Optional[List[Node]]:
            mapped = [forward[node].id for node in nodes if node in forward]
            return mapped if len(mapped) == len(nodes) else None

        for tag in policy.tags:
            ref = forward.get(tag.attribute_ref)
            bindings = remap(sorted(tag.validity_bindings, key=str))
            if ref is None or bindings is None:
                continue
            self.tags.append(Tag(
                id=self._node("tag", pairing, tag.id), category=tag.category,
                attribute_ref=ref.id, descriptor=ref.class_, validity_bindings=frozenset(bindings),
            ))

        for prohibition in policy.prohibitions:
            bindings = remap(sorted(prohibition.validity_bindings, key=str))
            if bindings is None:
                continue
            self.prohibitions.append(Prohibition(
                id=self._node("prohibition", pairing, prohibition.id), mode=prohibition.mode,
                condition=prohibition.condition, validity_bindings=frozenset(bindings),
            ))

        for obligation in policy.obligations:
            bindings = remap(sorted(obligation.validity_bindings, key=str))
            args = remap(list(obligation.args))
            if bindings is None or args is None:
                continue
            self.obligations.append(Obligation(
                id=self._node("obligation", pairing, obligation.id),
                obligation_class=obligation.obligation_class, args=tuple(args),
                condition=obligation.condition, validity_bindings=frozenset(bindings),
            ))

    def result(self) -> DerivedPolicy:
        def by_id(items):
            return tuple(sorted(items, key=lambda item: str(item.id)))

        app_name = self.kb.app.name
        policy = Policy(
            id=stable_bnode("policy", app_name, self.port),
            attributes=by_id(self.attributes),
            tags=by_id(self.tags),
            prohibitions=by_id(self.prohibitions),
            obligations=by_id(self.obligations),
        )
        policy_set = DataPolicySet(
            data_node=stable_bnode("data", app_name, self.port),
            uri=unbound_output_uri(self.port),
            policy=policy,
        )
        return DerivedPolicy(output_port=self.port, policy=policy_set, links=frozenset(self.links))


def derive_policy(kb: KnowledgeBase, port_name: str, reverse_order: bool = False) -> DerivedPolicy:
    """
    Derive the policy of one output port

    Args:
        kb: Assembled knowledge base
        port_name: Output port to derive
        reverse_order: Visit from-inputs in reverse order

    Returns:
        DerivedPolicy whose uri is a placeholder; bind it before storing

    Raises:
        DerivationError: unknown output port, or a from-port with no data policy
    """
    output = kb.app.output(port_name)
    if output is None:
        raise DerivationError(port_name, f"{kb.app.name} has no output with this port")

    derivation = _Derivation(kb, output)
    from_ports = tuple(reversed(output.from_ports)) if reverse_order else output.from_ports
    for from_port in from_ports:
        pairings = kb.pairings_for(from_port)
        if not pairings:
            raise DerivationError(from_port, f"output {port_name!r} reads from an input with no data policy")
        for pairing in (reversed(pairings) if reverse_order else pairings):
            derivation.add(pairing)

    derived = derivation.result()
    logger.debug(
        f"Derived policy for {kb.app.name} port {port_name!r}: "
        f"{len(derived.policy.policy.attributes)} attributes, {len(derived.links)} links"
    )
    return derived


def derive_policies(kb: KnowledgeBase, reverse_order: bool = False) -> List[DerivedPolicy]:
    """Derived policy of every output port, ordered by port name"""
    outputs = sorted(kb.app.outputs, key=lambda spec: spec.port_name, reverse=reverse_order)
    derived = [derive_policy(kb, output.port_name, reverse_order) for output in outputs]
    return sorted(derived, key=lambda d: d.output_port)


__all__ = ["derive_policies", "derive_policy", "refine"]
