"""
rdfs:subClassOf closure
Optional preprocessing before policy reasoning; also feeds obligation kind labelling
"""
import logging
from typing import Dict, FrozenSet, Iterable

from rdflib import Graph, URIRef
from rdflib.namespace import RDFS

logger = logging.getLogger(__name__)


def superclass_table(graph: Graph) -> Dict[URIRef, FrozenSet[URIRef]]:
    """
    Map every class with a subClassOf triple to all of its superclasses

    A class is not listed as its own superclass unless it sits on a cycle.
    Cycle members end up sharing one superclass set, i.e. they are treated
    as equivalent.
    """
    table: Dict[URIRef, FrozenSet[URIRef]] = {}
    for sub in sorted(set(graph.subjects(RDFS.subClassOf, None)), key=str):
        if not isinstance(sub, URIRef):
            continue
        reachable = set()
        for direct in graph.objects(sub, RDFS.subClassOf):
            reachable.update(graph.transitive_objects(direct, RDFS.subClassOf))
        reachable = {node for node in reachable if isinstance(node, URIRef)}
        if sub in reachable:
            logger.warning(f"rdfs:subClassOf cycle through {sub}; members treated as equivalent")
        table[sub] = frozenset(reachable)
    return table


def rdfs_closure(graph: Graph) -> Graph:
    """
    Materialize the transitive closure of rdfs:subClassOf

    Args:
        graph: Graph that may hold subClassOf triples

    Returns:
        New graph with every triple of `graph` plus `a subClassOf c` for each
        chain a -> ... -> c; equal to `graph` when there is nothing to add
    """
    closed = Graph(bind_namespaces="core")
    for prefix, namespace in graph.namespaces():
        closed.bind(prefix, namespace, override=True)
    for triple in graph:
        closed.add(triple)
    added = 0
    for sub, supers in superclass_table(graph).items():
        for sup in supers:
            if (sub, RDFS.subClassOf, sup) not in closed:
                closed.add((sub, RDFS.subClassOf, sup))
                added += 1
    logger.debug(f"subClassOf closure added {added} triples")
    return closed


def merged_superclass_table(graphs: Iterable[Graph]) -> Dict[URIRef, FrozenSet[URIRef]]:
    """Superclass table over the subClassOf triples of several graphs"""
    combined = Graph()
    for graph in graphs:
        for triple in graph.triples((None, RDFS.subClassOf, None)):
            combined.add(triple)
    return superclass_table(combined)


__all__ = ["merged_superclass_table", "rdfs_closure", "superclass_table"]
