"""
Policy models for the DToU language
Typed, immutable views of data policies, app policies and usage contexts
"""
from enum import Enum
from typing import Dict, FrozenSet, Optional, Tuple, Union

from pydantic import BaseModel, ConfigDict, Field, PrivateAttr, model_validator
from rdflib import BNode, Literal, URIRef

from rdf.namespaces import DTOU

Node = Union[URIRef, BNode]
Term = Union[URIRef, BNode, Literal]

SECURITY = DTOU.Security
INTEGRITY = DTOU.Integrity
PURPOSE = DTOU.Purpose
USE = DTOU.Use
NIL = DTOU.nil

KNOWN_CATEGORIES = (SECURITY, INTEGRITY, PURPOSE)


def is_requirement_category(category: URIRef) -> bool:
    """Data-side tags of these categories must be provided by the app (Security and unknown categories)"""
    return category not in (INTEGRITY, PURPOSE)


class PolicyModel(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)


class Attribute(PolicyModel):
    """Base-layer fact: (name, class, value)"""
    id: Node
    name: URIRef
    class_: URIRef
    value: Term = Field(..., description="IRI, literal, or :nil")


class Tag(PolicyModel):
    """
    Semantic-layer tag

    The descriptor is the class of the referenced attribute; it is stored
    here so matching never needs the attribute table.
    """
    id: Node
    category: URIRef
    attribute_ref: Node
    descriptor: URIRef
    validity_bindings: FrozenSet[Node] = frozenset()


class ActivationCondition(PolicyModel):
    """Matcher against the usage context; absent fields match anything"""
    user: Optional[URIRef] = None
    app_name: Optional[URIRef] = None
    purpose: Optional[URIRef] = None

    @model_validator(mode="after")
    def _not_empty(self) -> "ActivationCondition":
        if self.user is None and self.app_name is None and self.purpose is None:
            raise ValueError("activation condition needs at least one of user, app_name, purpose")
        return self

    def matches(self, user: Optional[URIRef], app_name: Optional[URIRef], purpose: Optional[URIRef]) -> bool:
        return all(
            expected is None or expected == actual
            for expected, actual in ((self.user, user), (self.app_name, app_name), (self.purpose, purpose))
        )


class Prohibition(PolicyModel):
    id: Node
    mode: URIRef = USE
    condition: ActivationCondition
    validity_bindings: FrozenSet[Node] = frozenset()

    @model_validator(mode="after")
    def _use_mode_only(self) -> "Prohibition":
        if self.mode != USE:
            raise ValueError(f"unsupported prohibition mode {self.mode}")
        return self


class Obligation(PolicyModel):
    id: Node
    obligation_class: URIRef
    args: Tuple[Node, ...] = ()
    condition: ActivationCondition
    validity_bindings: FrozenSet[Node] = frozenset()


class Policy(PolicyModel):
    """The :Policy node of a data policy set"""
    id: Node
    attributes: Tuple[Attribute, ...] = ()
    tags: Tuple[Tag, ...] = ()
    prohibitions: Tuple[Prohibition, ...] = ()
    obligations: Tuple[Obligation, ...] = ()

    _attribute_index: Dict[Node, Attribute] = PrivateAttr(default_factory=dict)

    def model_post_init(self, __context: object) -> None:
        self._attribute_index = {attribute.id: attribute for attribute in self.attributes}

    def attribute(self, node: Node) -> Optional[Attribute]:
        return self._attribute_index.get(node)

    @model_validator(mode="after")
    def _references_resolve(self) -> "Policy":
        known = {attribute.id for attribute in self.attributes}
        if len(known) != len(self.attributes):
            raise ValueError("attribute ids must be unique within a policy")
        for tag in self.tags:
            missing = ({tag.attribute_ref} | tag.validity_bindings) - known
            if missing:
                raise ValueError(f"tag {tag.id} references unknown attributes {sorted(missing)}")
        for prohibition in self.prohibitions:
            if prohibition.validity_bindings - known:
                raise ValueError(f"prohibition {prohibition.id} references unknown attributes")
        for obligation in self.obligations:
            if (set(obligation.args) | obligation.validity_bindings) - known:
                raise ValueError(f"obligation {obligation.id} references unknown attributes")
        return self


class DataPolicySet(PolicyModel):
    """A data IRI paired with the policy governing it"""
    data_node: Node
    uri: URIRef = Field(..., description="IRI of the governed data")
    policy: Policy


class TagSpec(PolicyModel):
    """(category, descriptor) pair declared by an input spec"""
    category: URIRef
    descriptor: URIRef


class Downstream(PolicyModel):
    """Simplified app policy of a party the input is forwarded to"""
    app_name: URIRef
    user: Optional[URIRef] = None
    purpose: Optional[URIRef] = None


class InputSpec(PolicyModel):
    id: Node
    port_name: str
    data_uri: URIRef
    provides: FrozenSet[TagSpec] = frozenset()
    expects: FrozenSet[TagSpec] = frozenset()
    purposes: FrozenSet[URIRef] = frozenset()
    downstreams: Tuple[Downstream, ...] = ()

    @model_validator(mode="after")
    def _categories(self) -> "InputSpec":
        for spec in self.provides:
            if not is_requirement_category(spec.category):
                raise ValueError(f"input {self.port_name!r} cannot provide a {spec.category} tag")
        for spec in self.expects:
            if spec.category == SECURITY:
                raise ValueError(f"input {self.port_name!r} cannot expect a Security tag")
        return self

    @property
    def expectations(self) -> FrozenSet[TagSpec]:
        """Expected tags plus one Purpose expectation per declared purpose"""
        return self.expects | frozenset(TagSpec(category=PURPOSE, descriptor=purpose) for purpose in self.purposes)


class Filter(PolicyModel):
    """Attribute matcher of a refinement; absent fields are wildcards"""
    input_port: Optional[str] = None
    name: Optional[URIRef] = None
    class_: Optional[URIRef] = None
    value: Optional[Term] = None

    @model_validator(mode="after")
    def _not_empty(self) -> "Filter":
        if self.input_port is None and self.name is None and self.class_ is None and self.value is None:
            raise ValueError("filter needs at least one of input, name, class, value")
        return self

    def matches(self, attribute: Attribute, port_name: str) -> bool:
        # Literal equality is term equality: lexical form and datatype, no coercion
        return (
            (self.input_port is None or self.input_port == port_name)
            and (self.name is None or self.name == attribute.name)
            and (self.class_ is None or self.class_ == attribute.class_)
            and (self.value is None or self.value == attribute.value)
        )


class RefinementKind(str, Enum):
    DELETE = "Delete"
    EDIT = "Edit"


class Refinement(PolicyModel):
    id: Node
    kind: RefinementKind
    filter: Filter
    new_class: Optional[URIRef] = None
    new_value: Optional[Term] = None

    @model_validator(mode="after")
    def _edit_fields(self) -> "Refinement":
        has_new = (self.new_class is not None, self.new_value is not None)
        if self.kind is RefinementKind.EDIT and has_new != (True, True):
            raise ValueError(f"edit refinement {self.id} needs both new_class and new_value")
        if self.kind is RefinementKind.DELETE and any(has_new):
            raise ValueError(f"delete refinement {self.id} cannot carry new_class or new_value")
        return self


class OutputSpec(PolicyModel):
    id: Node
    port_name: str
    from_ports: Tuple[str, ...]
    refinements: Tuple[Refinement, ...] = ()


class AppPolicy(PolicyModel):
    id: Node
    name: URIRef
    inputs: Tuple[InputSpec, ...] = ()
    outputs: Tuple[OutputSpec, ...] = ()

    @model_validator(mode="after")
    def _ports(self) -> "AppPolicy":
        input_ports = [spec.port_name for spec in self.inputs]
        if len(set(input_ports)) != len(input_ports):
            raise ValueError("input port names must be distinct")
        output_ports = [spec.port_name for spec in self.outputs]
        if len(set(output_ports)) != len(output_ports):
            raise ValueError("output port names must be distinct")
        for output in self.outputs:
            unknown = set(output.from_ports) - set(input_ports)
            if unknown:
                raise ValueError(f"output {output.port_name!r} reads from unknown ports {sorted(unknown)}")
        return self

    def input(self, port_name: str) -> Optional[InputSpec]:
        return next((spec for spec in self.inputs if spec.port_name == port_name), None)

    def output(self, port_name: str) -> Optional[OutputSpec]:
        return next((spec for spec in self.outputs if spec.port_name == port_name), None)


class UsageContext(PolicyModel):
    """User, app and time of one reasoning request; time is carried, never evaluated"""
    id: Node
    user: URIRef
    app_policy: Node = Field(..., description="Node of the app policy this context refers to")
    time: Literal
