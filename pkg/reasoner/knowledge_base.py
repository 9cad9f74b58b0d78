"""
Knowledge base assembly
Pairs each input spec of the app with the data policies of the data it reads
"""
import logging
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence

from rdflib import Graph, URIRef

from policy.extract import extract_app_policy, extract_data_policies, extract_usage_context
from policy.models import AppPolicy, DataPolicySet, UsageContext
from rdf.turtle import relabel_blank_nodes
from reasoner.closure import merged_superclass_table
from reasoner.models import KnowledgeBase, Pairing

logger = logging.getLogger(__name__)


def build_knowledge_base(
    context: UsageContext,
    app: AppPolicy,
    data_policies: Iterable[DataPolicySet],
    superclasses: Optional[Dict[URIRef, FrozenSet[URIRef]]] = None,
    rdfs_closure: bool = False,
) -> KnowledgeBase:
    """
    Assemble a knowledge base from already extracted policies

    Args:
        context: Usage context of the request
        app: App policy the context refers to
        data_policies: Every data policy set available to the request
        superclasses: subClassOf closure table (see reasoner.closure)
        rdfs_closure: Match tag descriptors through the closure

    Returns:
        KnowledgeBase with pairings, uncovered inputs and warnings filled in
    """
    by_uri: Dict[URIRef, List[DataPolicySet]] = {}
    for policy_set in data_policies:
        by_uri.setdefault(policy_set.uri, []).append(policy_set)

    warnings = []
    for uri, sets in sorted(by_uri.items(), key=lambda item: str(item[0])):
        if len(sets) > 1:
            message = f"{len(sets)} data policies share uri {uri}; each pairs with inputs reading it"
            logger.warning(message)
            warnings.append(message)

    pairings = []
    uncovered = []
    for spec in app.inputs:
        matches = by_uri.get(spec.data_uri, [])
        if not matches:
            message = f"input {spec.port_name!r} reads {spec.data_uri}, which has no data policy"
            logger.warning(message)
            warnings.append(message)
            uncovered.append(spec.port_name)
        pairings.extend(Pairing(input=spec, data=policy_set) for policy_set in matches)

    return KnowledgeBase(
        context=context,
        app=app,
        data_policies={uri: tuple(sets) for uri, sets in by_uri.items()},
        pairings=tuple(pairings),
        uncovered_inputs=tuple(uncovered),
        warnings=tuple(warnings),
        superclasses=superclasses or {},
        rdfs_closure=rdfs_closure,
    )


def assemble(
    context_graph: Graph,
    app_graph: Graph,
    data_graphs: Sequence[Graph],
    vocabulary: Optional[Graph] = None,
    rdfs_closure: bool = False,
) -> KnowledgeBase:
    """
    Extract and assemble every document of one reasoning request

    Data documents get per-document blank-node prefixes so that anonymous
    terms of different documents never merge.

    Args:
        context_graph: Graph holding the :UsageContext
        app_graph: Graph holding the :AppPolicy
        data_graphs: One graph per data policy document
        vocabulary: Extra graph contributing only subClassOf triples
        rdfs_closure: Match tag descriptors through the subClassOf closure

    Raises:
        StructuralError, DanglingReferenceError: from extraction
    """
    app = extract_app_policy(app_graph)
    context = extract_usage_context(context_graph, app)
    relabelled = [relabel_blank_nodes(graph, f"d{index}") for index, graph in enumerate(data_graphs)]
    data_policies = [policy_set for graph in relabelled for policy_set in extract_data_policies(graph)]

    sources = [context_graph, app_graph, *data_graphs]
    if vocabulary is not None:
        sources.append(vocabulary)
    kb = build_knowledge_base(
        context, app, data_policies,
        superclasses=merged_superclass_table(sources),
        rdfs_closure=rdfs_closure,
    )
    logger.debug(
        f"Assembled knowledge base for {app.name}: {len(data_policies)} data policies, "
        f"{len(kb.pairings)} pairings, {len(kb.uncovered_inputs)} uncovered inputs"
    )
    return kb


__all__ = ["assemble", "build_knowledge_base"]
