"""
Conformance check
Unsatisfied requirements, unmatched expectations and prohibited uses,
evaluated with negation over the fully materialized knowledge base
"""
import logging
from typing import Callable, Dict, FrozenSet, Iterable, List, Optional, Set, Tuple

from rdflib import URIRef

from policy.models import USE, is_requirement_category
from reasoner.models import Conflict, ConflictKind, KnowledgeBase, Pairing

logger = logging.getLogger(__name__)

TagIndex = Dict[URIRef, FrozenSet[URIRef]]


def _index(specs: Iterable) -> TagIndex:
    """category -> descriptors"""
    index: Dict[URIRef, Set[URIRef]] = {}
    for spec in specs:
        index.setdefault(spec.category, set()).add(spec.descriptor)
    return {category: frozenset(descriptors) for category, descriptors in index.items()}


class _Facts:
    """Positive facts every negated subgoal is evaluated against"""

    def __init__(self, kb: KnowledgeBase, pairings: Tuple[Pairing, ...]):
        self.kb = kb
        self.pairings = pairings
        self.provided: Dict[str, TagIndex] = {
            pairing.input.port_name: _index(pairing.input.provides) for pairing in pairings
        }
        self.tagged: Dict[object, TagIndex] = {
            pairing.data.data_node: _index(pairing.data.policy.tags) for pairing in pairings
        }

    def has(self, index: TagIndex, category: URIRef, descriptor: URIRef) -> bool:
        candidates = index.get(category, frozenset())
        if descriptor in candidates:
            return True
        return self.kb.rdfs_closure and any(self.kb.is_subclass(c, descriptor) for c in candidates)


def _unsatisfied_requirements(facts: _Facts) -> Iterable[Conflict]:
    for pairing in facts.pairings:
        provided = facts.provided[pairing.input.port_name]
        for tag in pairing.data.policy.tags:
            if not is_requirement_category(tag.category):
                continue
            if not facts.has(provided, tag.category, tag.descriptor):
                yield Conflict(
                    kind=ConflictKind.UNSATISFIED_REQUIREMENT,
                    input_port=pairing.input.port_name,
                    category=tag.category,
                    descriptor=tag.descriptor,
                )


def _unmatched_expectations(facts: _Facts) -> Iterable[Conflict]:
    for pairing in facts.pairings:
        tagged = facts.tagged[pairing.data.data_node]
        for expected in pairing.input.expectations:
            if not facts.has(tagged, expected.category, expected.descriptor):
                yield Conflict(
                    kind=ConflictKind.UNMATCHED_EXPECTATION,
                    input_port=pairing.input.port_name,
                    category=expected.category,
                    descriptor=expected.descriptor,
                )


def _usages(facts: _Facts, pairing: Pairing) -> Iterable[Tuple[bool, URIRef, Optional[URIRef]]]:
    """(direct, app name, purpose) of the direct use and of every downstream"""
    purposes: List[Optional[URIRef]] = sorted(pairing.input.purposes, key=str) or [None]
    for purpose in purposes:
        yield True, facts.kb.app.name, purpose
    for downstream in pairing.input.downstreams:
        yield False, downstream.app_name, downstream.purpose


def _prohibited_uses(facts: _Facts) -> Iterable[Conflict]:
    user = facts.kb.context.user
    for pairing in facts.pairings:
        for prohibition in pairing.data.policy.prohibitions:
            if prohibition.mode != USE:
                continue
            condition = prohibition.condition
            for direct, app_name, purpose in _usages(facts, pairing):
                # downstreams are matched on app name and purpose only
                if condition.matches(user if direct else condition.user, app_name, purpose):
                    yield Conflict(
                        kind=ConflictKind.PROHIBITED_USE,
                        input_port=pairing.input.port_name,
                        mode=prohibition.mode,
                        user=user,
                        app_name=app_name,
                        purpose=purpose,
                    )


RULES: Dict[ConflictKind, Callable[[_Facts], Iterable[Conflict]]] = {
    ConflictKind.UNSATISFIED_REQUIREMENT: _unsatisfied_requirements,
    ConflictKind.UNMATCHED_EXPECTATION: _unmatched_expectations,
    ConflictKind.PROHIBITED_USE: _prohibited_uses,
}


def check_conformance(kb: KnowledgeBase, reverse_order: bool = False,
                      kinds: Optional[Iterable[ConflictKind]] = None) -> List[Conflict]:
    """
    Find every conflict between the app and the paired data policies

    Pairings are materialized before any rule runs; each rule only negates
    over those facts, so rule order cannot change the result.

    Args:
        kb: Assembled knowledge base
        reverse_order: Evaluate rules and pairings in reverse order
        kinds: Only look for these conflict kinds (all when omitted)

    Returns:
        Sorted, duplicate-free conflicts; empty means the usage is permitted
    """
    pairings = tuple(reversed(kb.pairings)) if reverse_order else kb.pairings
    facts = _Facts(kb, pairings)
    wanted = None if kinds is None else set(kinds)
    selected = [kind for kind in ConflictKind if wanted is None or kind in wanted]
    rules = [RULES[kind] for kind in (reversed(selected) if reverse_order else selected)]

    found: Set[Conflict] = set()
    for rule in rules:
        found.update(rule(facts))
    conflicts = sorted(found, key=Conflict.sort_key)
    logger.debug(f"Conformance check for {kb.app.name}: {len(conflicts)} conflicts")
    return conflicts


__all__ = ["check_conformance"]
