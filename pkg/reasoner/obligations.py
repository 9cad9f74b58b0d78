"""
Obligation check
"""
import logging
from typing import List, Optional, Set

from rdflib import URIRef

from policy.errors import DanglingReferenceError
from reasoner.models import ActivatedObligation, ArgValue, KnowledgeBase

logger = logging.getLogger(__name__)


def check_obligations(kb: KnowledgeBase, reverse_order: bool = False) -> List[ActivatedObligation]:
    """
    Obligations whose activation condition matches the direct use of a paired input

    Downstreams never activate obligations. Argument attributes are resolved
    so callers get their name, class and value in declaration order.

    Args:
        kb: Assembled knowledge base
        reverse_order: Visit pairings in reverse order

    Returns:
        Sorted, duplicate-free activations

    Raises:
        DanglingReferenceError: an argument names no attribute of its policy
    """
    pairings = tuple(reversed(kb.pairings)) if reverse_order else kb.pairings
    found: Set[ActivatedObligation] = set()
    for pairing in pairings:
        policy = pairing.data.policy
        purposes: List[Optional[URIRef]] = sorted(pairing.input.purposes, key=str) or [None]
        for obligation in policy.obligations:
            if not any(obligation.condition.matches(kb.context.user, kb.app.name, p) for p in purposes):
                continue
            args = []
            for ref in obligation.args:
                attribute = policy.attribute(ref)
                if attribute is None:
                    raise DanglingReferenceError(obligation.id, "args", ref, "the same policy")
                args.append(ArgValue(name=attribute.name, class_=attribute.class_, value=attribute.value))
            found.add(ActivatedObligation(
                obligation_class=obligation.obligation_class,
                arg_values=tuple(args),
                input_port=pairing.input.port_name,
            ))
    obligations = sorted(found, key=ActivatedObligation.sort_key)
    logger.debug(f"Obligation check for {kb.app.name}: {len(obligations)} activated")
    return obligations


__all__ = ["check_obligations"]
