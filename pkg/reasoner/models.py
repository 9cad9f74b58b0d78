"""
Result models for the reasoning tasks
"""
from enum import Enum
from typing import Dict, FrozenSet, Optional, Tuple
from urllib.parse import quote

from pydantic import BaseModel, ConfigDict, Field
from rdflib import URIRef

from policy.models import AppPolicy, DataPolicySet, InputSpec, Node, Term, UsageContext
from rdf.namespaces import DTOU


class ReasonerModel(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)


class ConflictKind(str, Enum):
    UNSATISFIED_REQUIREMENT = "UnsatisfiedRequirement"
    UNMATCHED_EXPECTATION = "UnmatchedExpectation"
    PROHIBITED_USE = "ProhibitedUse"


class Conflict(ReasonerModel):
    """
    One conflict found by the conformance check

    Tag conflicts carry category and descriptor; prohibited uses carry
    mode, user, app_name and purpose (any of which may be None when the
    usage context gives no value for it).
    """
    kind: ConflictKind
    input_port: str
    category: Optional[URIRef] = None
    descriptor: Optional[URIRef] = None
    mode: Optional[URIRef] = None
    user: Optional[URIRef] = None
    app_name: Optional[URIRef] = None
    purpose: Optional[URIRef] = None

    def sort_key(self) -> Tuple[str, ...]:
        return (
            self.kind.value, self.input_port,
            *(str(value or "") for value in (self.category, self.descriptor, self.user, self.app_name, self.purpose)),
        )


class ArgValue(ReasonerModel):
    """Resolved obligation argument: the referenced attribute's fields"""
    name: URIRef
    class_: URIRef
    value: Term


class ActivatedObligation(ReasonerModel):
    obligation_class: URIRef
    arg_values: Tuple[ArgValue, ...] = ()
    input_port: str

    def sort_key(self) -> Tuple[str, ...]:
        return (
            str(self.obligation_class), self.input_port,
            *(f"{arg.name} {arg.class_} {arg.value}" for arg in self.arg_values),
        )


class ForwardLink(ReasonerModel):
    """
    Input attribute `origin` survives at output `port` as attribute `ref`

    Links are unique per (origin, port, input_port): when two from-inputs read
    the same data, each input gets its own copy of the attribute and its own link.
    """
    origin: Node
    port: str
    ref: Node
    input_port: str = Field(..., description="Input port the origin attribute arrived on")
    source: Node = Field(..., description=":Data node of the policy holding the origin attribute")


def unbound_output_uri(port: str) -> URIRef:
    """Placeholder uri of a derived policy until the caller binds it"""
    return DTOU[f"unbound-output/{quote(port, safe='')}"]


class DerivedPolicy(ReasonerModel):
    output_port: str
    policy: DataPolicySet = Field(..., description="Derived policy set; uri is a placeholder until bound")
    links: FrozenSet[ForwardLink] = frozenset()

    def bind(self, uri: URIRef) -> DataPolicySet:
        """The derived policy set governing the data stored at `uri`"""
        return self.policy.model_copy(update={"uri": uri})


class Pairing(ReasonerModel):
    """An input spec and a data policy whose uri matches its :data"""
    input: InputSpec
    data: DataPolicySet


class KnowledgeBase(ReasonerModel):
    """
    Everything one reasoning request looks at

    Immutable once assembled; reasoning tasks only read it.
    """
    context: UsageContext
    app: AppPolicy
    data_policies: Dict[URIRef, Tuple[DataPolicySet, ...]] = Field(default_factory=dict)
    pairings: Tuple[Pairing, ...] = ()
    uncovered_inputs: Tuple[str, ...] = ()
    warnings: Tuple[str, ...] = ()
    superclasses: Dict[URIRef, FrozenSet[URIRef]] = Field(
        default_factory=dict, description="class -> all superclasses, from the subClassOf closure"
    )
    rdfs_closure: bool = Field(default=False, description="Match tag descriptors through the subClassOf closure")

    def pairings_for(self, port_name: str) -> Tuple[Pairing, ...]:
        return tuple(pairing for pairing in self.pairings if pairing.input.port_name == port_name)

    def is_subclass(self, sub: URIRef, sup: URIRef) -> bool:
        """Descriptor `sub` satisfies `sup`: equality, or subClassOf when closure matching is on"""
        if sub == sup:
            return True
        return self.rdfs_closure and sup in self.superclasses.get(sub, frozenset())
