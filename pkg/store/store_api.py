"""
Store API
High-level helpers the service uses on top of the global policy store
"""
import logging
from datetime import datetime
from typing import List, Optional, Tuple

from rdflib import Graph

from policy.extract import extract_app_policy
from policy.models import AppPolicy
from rdf.turtle import parse_turtle
from store.models import AppRegistration, PolicyRecord, Provenance
from store.store import get_store

logger = logging.getLogger(__name__)


def store_policy(uri: str, document: str, provenance: Optional[Provenance] = None) -> PolicyRecord:
    """Validate and store the data policy of `uri` (see PolicyStore.put_policy)"""
    start = datetime.now()
    record = get_store().put_policy(uri, document, provenance)
    logger.debug(f"put_policy {uri} took {(datetime.now() - start).total_seconds():.3f}s")
    return record


def fetch_policy(uri: str) -> Optional[PolicyRecord]:
    return get_store().get_policy(uri)


def list_policy_records() -> List[PolicyRecord]:
    return get_store().list_policies()


def register_app_policy(document: str) -> AppRegistration:
    return get_store().register_app(document)


def load_registration(registration_id: str) -> Optional[Tuple[Graph, AppPolicy]]:
    """
    Parsed graph and extracted app policy of a live registration

    Returns:
        None when the id is unknown or expired
    """
    registration = get_store().get_app(registration_id)
    if registration is None:
        return None
    graph = parse_turtle(registration.app_policy_document)
    return graph, extract_app_policy(graph)


def load_data_graphs(app: AppPolicy) -> Tuple[List[Graph], List[str]]:
    """
    Graphs of the stored data policies of every input of `app`

    Each data uri is fetched once, in input order.

    Returns:
        (graphs, uris with no stored policy)
    """
    graphs: List[Graph] = []
    missing: List[str] = []
    seen = set()
    for spec in app.inputs:
        uri = str(spec.data_uri)
        if uri in seen:
            continue
        seen.add(uri)
        record = get_store().get_policy(uri)
        if record is None:
            missing.append(uri)
            continue
        graphs.append(parse_turtle(record.policy_document))
    if missing:
        logger.info(f"No stored data policy for {len(missing)} input uris: {missing}")
    return graphs, missing
