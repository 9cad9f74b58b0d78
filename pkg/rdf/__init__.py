"""
RDF core: Turtle parsing/serialization and graph helpers
"""
from .errors import DToUError, RelativeIriError, TurtleSyntaxError, UndefinedPrefixError
from .namespaces import DEFAULT_PREFIXES, DTOU
from .turtle import (
    ListNode,
    graphs_isomorphic,
    list_nodes,
    match,
    merge_graphs,
    parse_turtle,
    read_list,
    relabel_blank_nodes,
    serialize_turtle,
    stable_bnode,
    write_list,
)

__all__ = [
    "DEFAULT_PREFIXES",
    "DTOU",
    "DToUError",
    "ListNode",
    "RelativeIriError",
    "TurtleSyntaxError",
    "UndefinedPrefixError",
    "graphs_isomorphic",
    "list_nodes",
    "match",
    "merge_graphs",
    "parse_turtle",
    "read_list",
    "relabel_blank_nodes",
    "serialize_turtle",
    "stable_bnode",
    "write_list",
]
