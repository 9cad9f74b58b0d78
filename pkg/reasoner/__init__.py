"""
Reasoner: conformance, obligation and derivation tasks over an assembled knowledge base
"""
from .closure import merged_superclass_table, rdfs_closure, superclass_table
from .conformance import check_conformance
from .derivation import derive_policies, derive_policy
from .knowledge_base import assemble, build_knowledge_base
from .models import (
    ActivatedObligation,
    ArgValue,
    Conflict,
    ConflictKind,
    DerivedPolicy,
    ForwardLink,
    KnowledgeBase,
    Pairing,
    unbound_output_uri,
)
from .obligations import check_obligations
from .report import (
    SCHEMA_VERSION,
    ConformanceResponse,
    DerivationResponse,
    ObligationResponse,
    conformance_response,
    derivation_response,
    obligation_response,
)

__all__ = [
    "SCHEMA_VERSION",
    "ActivatedObligation",
    "ArgValue",
    "Conflict",
    "ConflictKind",
    "ConformanceResponse",
    "DerivationResponse",
    "DerivedPolicy",
    "ForwardLink",
    "KnowledgeBase",
    "ObligationResponse",
    "Pairing",
    "assemble",
    "build_knowledge_base",
    "check_conformance",
    "check_obligations",
    "conformance_response",
    "derivation_response",
    "derive_policies",
    "derive_policy",
    "merged_superclass_table",
    "obligation_response",
    "rdfs_closure",
    "superclass_table",
    "unbound_output_uri",
]
