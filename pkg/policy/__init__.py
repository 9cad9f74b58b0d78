"""
Policy model: typed data policies, app policies and usage contexts
"""
from .errors import DanglingReferenceError, DerivationError, PolicyError, StructuralError
from .extract import extract_app_policy, extract_data_policies, extract_usage_context
from .models import (
    INTEGRITY,
    NIL,
    PURPOSE,
    SECURITY,
    USE,
    ActivationCondition,
    AppPolicy,
    Attribute,
    DataPolicySet,
    Downstream,
    Filter,
    InputSpec,
    Obligation,
    OutputSpec,
    Policy,
    Prohibition,
    Refinement,
    RefinementKind,
    Tag,
    TagSpec,
    UsageContext,
)
from .to_graph import add_policy, app_policy_to_graph, policy_to_graph, usage_context_graph

__all__ = [
    "INTEGRITY",
    "NIL",
    "PURPOSE",
    "SECURITY",
    "USE",
    "ActivationCondition",
    "AppPolicy",
    "Attribute",
    "DanglingReferenceError",
    "DataPolicySet",
    "DerivationError",
    "Downstream",
    "Filter",
    "InputSpec",
    "Obligation",
    "OutputSpec",
    "Policy",
    "PolicyError",
    "Prohibition",
    "Refinement",
    "RefinementKind",
    "StructuralError",
    "Tag",
    "TagSpec",
    "UsageContext",
    "add_policy",
    "app_policy_to_graph",
    "extract_app_policy",
    "extract_data_policies",
    "extract_usage_context",
    "policy_to_graph",
    "usage_context_graph",
]
