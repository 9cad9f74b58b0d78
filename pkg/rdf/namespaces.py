"""
Vocabulary namespaces used by policy documents
"""
from typing import Dict

from rdflib import Namespace
from rdflib.namespace import RDF, RDFS, XSD

from config import load_settings

# The empty prefix ":" of every policy document resolves here
DTOU = Namespace(load_settings().vocab)

DEFAULT_PREFIXES: Dict[str, str] = {
    "": str(DTOU),
    "rdf": str(RDF),
    "rdfs": str(RDFS),
    "xsd": str(XSD),
}

__all__ = ["DTOU", "RDF", "RDFS", "XSD", "DEFAULT_PREFIXES"]
