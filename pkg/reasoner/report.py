"""
Report rendering
One JSON shape for reasoning results, shared by the CLI and the HTTP service
"""
from typing import Dict, List, Optional, Sequence

from pydantic import BaseModel, Field
from rdflib import URIRef

from policy.models import DataPolicySet
from policy.to_graph import policy_to_graph
from rdf.namespaces import DTOU
from rdf.turtle import serialize_turtle
from reasoner.models import ActivatedObligation, Conflict, ConflictKind, DerivedPolicy, KnowledgeBase

SCHEMA_VERSION = "1"

USER_OBLIGATION = DTOU.UserObligation
PROCESS_OBLIGATION = DTOU.ProcessObligation

# Usage context user of derivation requests; derivation reads neither user nor time
DERIVATION_USER = "urn:dtou:derivation"


def _text(term) -> Optional[str]:
    return None if term is None else str(term)


def render_conflict(conflict: Conflict) -> Dict[str, Optional[str]]:
    """Conflict as a flat dict; tag conflicts and prohibited uses carry different keys"""
    rendered: Dict[str, Optional[str]] = {"kind": conflict.kind.value, "input_port": conflict.input_port}
    if conflict.kind is ConflictKind.PROHIBITED_USE:
        rendered.update({
            "mode": _text(conflict.mode),
            "user": _text(conflict.user),
            "app_name": _text(conflict.app_name),
            "purpose": _text(conflict.purpose),
        })
    else:
        rendered.update({"category": _text(conflict.category), "descriptor": _text(conflict.descriptor)})
    return rendered


class ConformanceResponse(BaseModel):
    """Result of a conformance check"""
    schema_version: str = SCHEMA_VERSION
    app: str = Field(..., description="Name of the app policy")
    user: str
    time: str
    permitted: bool = Field(..., description="No conflicts, and in strict mode no uncovered inputs")
    conflicts: List[Dict[str, Optional[str]]] = Field(default_factory=list)
    uncovered_inputs: List[str] = Field(default_factory=list, description="Input ports without a data policy")
    warnings: List[str] = Field(default_factory=list)


def conformance_response(kb: KnowledgeBase, conflicts: Sequence[Conflict], strict: bool = False) -> ConformanceResponse:
    uncovered = list(kb.uncovered_inputs)
    return ConformanceResponse(
        app=str(kb.app.name),
        user=str(kb.context.user),
        time=str(kb.context.time),
        permitted=not conflicts and not (strict and uncovered),
        conflicts=[render_conflict(conflict) for conflict in conflicts],
        uncovered_inputs=uncovered,
        warnings=list(kb.warnings),
    )


def obligation_kind(obligation_class: URIRef, kb: KnowledgeBase) -> str:
    """'user' or 'process' when the class is (a subclass of) the matching vocabulary class"""
    lineage = {obligation_class} | set(kb.superclasses.get(obligation_class, frozenset()))
    if USER_OBLIGATION in lineage:
        return "user"
    if PROCESS_OBLIGATION in lineage:
        return "process"
    return "unspecified"


class ObligationEntry(BaseModel):
    obligation_class: str
    kind: str = Field(..., description="user, process or unspecified")
    input_port: str
    args: List[Dict[str, str]] = Field(default_factory=list, description="Resolved name/class/value of each argument")


class ObligationResponse(BaseModel):
    """Result of an obligation check"""
    schema_version: str = SCHEMA_VERSION
    app: str
    user: str
    time: str
    obligations: List[ObligationEntry] = Field(default_factory=list)


def obligation_response(kb: KnowledgeBase, obligations: Sequence[ActivatedObligation]) -> ObligationResponse:
    entries = [
        ObligationEntry(
            obligation_class=str(obligation.obligation_class),
            kind=obligation_kind(obligation.obligation_class, kb),
            input_port=obligation.input_port,
            args=[{"name": str(arg.name), "class": str(arg.class_), "value": str(arg.value)}
                  for arg in obligation.arg_values],
        )
        for obligation in obligations
    ]
    return ObligationResponse(
        app=str(kb.app.name), user=str(kb.context.user), time=str(kb.context.time), obligations=entries,
    )


def derived_policy_turtle(policy_set: DataPolicySet) -> str:
    """Turtle document of a bound derived policy"""
    return serialize_turtle(policy_to_graph(policy_set))


class DerivationResponse(BaseModel):
    """A derived policy, bound to the uri it is stored under"""
    schema_version: str = SCHEMA_VERSION
    output_port: str
    stored_uri: str
    policy: str = Field(..., description="Derived policy as Turtle")
    attributes: int
    tags: int
    prohibitions: int
    obligations: int


def derivation_response(derived: DerivedPolicy, uri: URIRef) -> DerivationResponse:
    bound = derived.bind(uri)
    return DerivationResponse(
        output_port=derived.output_port,
        stored_uri=str(uri),
        policy=derived_policy_turtle(bound),
        attributes=len(bound.policy.attributes),
        tags=len(bound.policy.tags),
        prohibitions=len(bound.policy.prohibitions),
        obligations=len(bound.policy.obligations),
    )


__all__ = [
    "DERIVATION_USER",
    "SCHEMA_VERSION",
    "ConformanceResponse",
    "DerivationResponse",
    "ObligationEntry",
    "ObligationResponse",
    "conformance_response",
    "derivation_response",
    "derived_policy_turtle",
    "obligation_kind",
    "obligation_response",
    "render_conflict",
]
