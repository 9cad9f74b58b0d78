"""
Turtle parsing and serialization for policy documents
Wraps rdflib so that every graph the engine sees has prefixes resolved,
deterministic blank-node labels and no unresolved relative IRIs
"""
import hashlib
import logging
import re
from typing import Dict, Iterable, List, Mapping, NamedTuple, Optional, Sequence, Tuple, Union

from rdflib import BNode, Graph, Literal, URIRef
from rdflib.compare import isomorphic
from rdflib.namespace import RDF
from rdflib.plugins.parsers.notation3 import BadSyntax

from rdf.errors import RelativeIriError, TurtleSyntaxError, UndefinedPrefixError
from rdf.namespaces import DEFAULT_PREFIXES

logger = logging.getLogger(__name__)

Node = Union[URIRef, BNode]
Term = Union[URIRef, BNode, Literal]
Triple = Tuple[Node, URIRef, Term]

# Relative IRIs resolve against this when the caller gives no base; any IRI
# that ends up under it is reported as an error.
_NO_BASE = "http://no-base.invalid/"

_PREFIX_DECLARATION = re.compile(r"^@prefix\s+([A-Za-z][\w.-]*)?:", re.MULTILINE)


class ListNode(NamedTuple):
    """An RDF collection: its head node and the members in order"""
    head: Node
    items: Tuple[Term, ...]


class _DocumentGraph(Graph):
    """Graph that remembers its blank nodes in the order the parser adds them"""

    def __init__(self):
        super().__init__(bind_namespaces="core")
        self.blank_nodes: Dict[BNode, None] = {}

    def add(self, triple):
        s, _, o = triple
        for term in (s, o):
            if isinstance(term, BNode):
                self.blank_nodes.setdefault(term, None)
        return super().add(triple)


def _prefix_header(prefixes: Mapping[str, str]) -> str:
    # Single line so error positions shift by exactly one line
    return " ".join(f"@prefix {prefix}: <{namespace}> ." for prefix, namespace in prefixes.items()) + "\n"


def _syntax_error(exc: BadSyntax, header: str) -> TurtleSyntaxError:
    why = str(getattr(exc, "_why", exc))
    raw = getattr(exc, "_str", b"")
    if isinstance(raw, str):
        raw = raw.encode("utf-8")
    position = getattr(exc, "_i", None)
    line = column = None
    if isinstance(position, int) and raw:
        line = raw[:position].count(b"\n") + 1 - header.count("\n")
        column = position - (raw.rfind(b"\n", 0, position) + 1) + 1
    if "not bound" in why:
        return UndefinedPrefixError(why, line, column)
    return TurtleSyntaxError(why, line, column)


def _parser_failure(exc: Exception, text: str, header: str) -> TurtleSyntaxError:
    """Wrap an exception rdflib raised without a position; the document ended too early"""
    # rdflib quotes the text around the failure, which may reach into the prefix header
    message = (str(exc) or type(exc).__name__).split(" at ^")[0].replace(header.strip(), "").strip()
    if isinstance(exc, IndexError):
        message = "Unexpected end of document"
    lines = text.split("\n")
    return TurtleSyntaxError(message.splitlines()[0] if message else "Malformed document",
                             len(lines), len(lines[-1]) + 1)


def stable_bnode(*parts: object) -> BNode:
    """Blank node whose label is a digest of `parts`, so rebuilding a graph yields identical labels"""
    digest = hashlib.sha1("|".join(str(part) for part in parts).encode("utf-8")).hexdigest()
    return BNode(f"n{digest[:20]}")


def _document_labels(raw: _DocumentGraph) -> Graph:
    """Relabel blank nodes b0, b1, ... in the order they first appear in the document"""
    graph = Graph(bind_namespaces="core")
    for prefix, namespace in raw.namespaces():
        graph.bind(prefix, namespace, override=True)
    mapping = {label: BNode(f"b{index}") for index, label in enumerate(raw.blank_nodes)}
    for s, p, o in raw:
        graph.add((mapping.get(s, s), p, mapping.get(o, o)))
    return graph


def parse_turtle(text: str, base: Optional[str] = None,
                 prefixes: Optional[Mapping[str, str]] = None) -> Graph:
    """
    Parse a Turtle document into a Graph

    The vocabulary prefix ":" (plus rdf, rdfs, xsd) is pre-declared, so the
    short listings used throughout policy documentation parse as written.
    Documents may redeclare any of them.

    Args:
        text: Document text
        base: Base IRI for relative IRIs (relative IRIs are an error without one)
        prefixes: Pre-declared prefixes (defaults to DEFAULT_PREFIXES)

    Returns:
        Graph with prefixed names resolved and blank nodes labelled b0, b1, ...
        in document order, so the same text always yields the same labels

    Raises:
        TurtleSyntaxError: malformed document (with line/column when known)
        UndefinedPrefixError: prefix used but never declared
        RelativeIriError: relative IRI without a base
    """
    prefixes = DEFAULT_PREFIXES if prefixes is None else prefixes
    header = _prefix_header(prefixes) if prefixes else ""
    raw = _DocumentGraph()
    try:
        raw.parse(data=header + text, format="turtle", publicID=base or _NO_BASE)
    except BadSyntax as e:
        raise _syntax_error(e, header) from e
    except Exception as e:
        raise _parser_failure(e, text, header) from e

    if base is None:
        for triple in raw:
            for term in triple:
                if isinstance(term, URIRef) and str(term).startswith(_NO_BASE):
                    relative = str(term)[len(_NO_BASE):]
                    raise RelativeIriError(f"Relative IRI <{relative}> with no base IRI")

    graph = _document_labels(raw)
    logger.debug(f"Parsed Turtle document: {len(graph)} triples")
    return graph


def serialize_turtle(graph: Graph, prefixes: Optional[Mapping[str, str]] = None) -> str:
    """
    Serialize a Graph as Turtle

    Every requested prefix is declared, even when unused, so an empty graph
    yields a document holding only prefix declarations.

    Args:
        graph: Graph to serialize
        prefixes: prefix -> namespace IRI (defaults to DEFAULT_PREFIXES)

    Returns:
        Turtle document text
    """
    prefixes = DEFAULT_PREFIXES if prefixes is None else prefixes
    out = Graph(bind_namespaces="none")
    for prefix, namespace in prefixes.items():
        out.bind(prefix, namespace, override=True, replace=True)
    for triple in graph:
        out.add(triple)
    body = out.serialize(format="turtle")
    declared = {match or "" for match in _PREFIX_DECLARATION.findall(body)}
    missing = [f"@prefix {prefix}: <{namespace}> ." for prefix, namespace in prefixes.items()
               if prefix not in declared]
    if not missing:
        return body
    return "\n".join(missing) + "\n" + body


def match(graph: Graph, s: Optional[Term] = None, p: Optional[Term] = None,
          o: Optional[Term] = None) -> List[Triple]:
    """
    All triples matching the given components; None is a wildcard

    Lookups go through rdflib's subject/predicate/object indexes.
    """
    return list(graph.triples((s, p, o)))  # type: ignore[arg-type]


def relabel_blank_nodes(graph: Graph, prefix: str) -> Graph:
    """Copy of `graph` with every blank-node label prefixed by `prefix`"""
    relabelled = Graph(bind_namespaces="core")
    for s, p, o in graph:
        if isinstance(s, BNode):
            s = BNode(f"{prefix}{s}")
        if isinstance(o, BNode):
            o = BNode(f"{prefix}{o}")
        relabelled.add((s, p, o))
    return relabelled


def merge_graphs(graphs: Iterable[Graph]) -> Graph:
    """
    Union of several documents in one Graph

    Blank nodes get a per-document prefix (d0, d1, ...) so documents never
    share a blank node by accident.
    """
    merged = Graph(bind_namespaces="core")
    for index, graph in enumerate(graphs):
        for triple in relabel_blank_nodes(graph, f"d{index}"):
            merged.add(triple)
    return merged


def graphs_isomorphic(first: Graph, second: Graph) -> bool:
    """Equality up to blank-node renaming"""
    return isomorphic(first, second)


def read_list(graph: Graph, head: Term) -> ListNode:
    """
    Read the RDF collection starting at `head`

    Raises:
        ValueError: `head` is not a well-formed collection
    """
    if head == RDF.nil:
        return ListNode(head, ())
    if not isinstance(head, (URIRef, BNode)) or graph.value(head, RDF.first) is None:
        raise ValueError(f"{head} is not an RDF collection")
    items: List[Term] = []
    seen = set()
    node: Optional[Term] = head
    while node is not None and node != RDF.nil:
        if node in seen:
            raise ValueError(f"RDF collection at {head} is cyclic")
        seen.add(node)
        first = graph.value(node, RDF.first)  # type: ignore[arg-type]
        rest = graph.value(node, RDF.rest)  # type: ignore[arg-type]
        if first is None or rest is None:
            raise ValueError(f"RDF collection at {head} is truncated at {node}")
        items.append(first)
        node = rest
    return ListNode(head, tuple(items))  # type: ignore[arg-type]


def write_list(graph: Graph, items: Sequence[Term], *seed: object) -> Node:
    """
    Add the rdf:first/rdf:rest encoding of `items` to `graph`

    Cell labels are derived from `seed`, so the same call on the same
    arguments produces the same triples.

    Returns:
        Head node of the collection (rdf:nil for an empty list)
    """
    if not items:
        return RDF.nil
    cells = [stable_bnode(*seed, "list", index) for index in range(len(items))]
    for index, (cell, item) in enumerate(zip(cells, items)):
        graph.add((cell, RDF.first, item))
        graph.add((cell, RDF.rest, cells[index + 1] if index + 1 < len(cells) else RDF.nil))
    return cells[0]


def list_nodes(graph: Graph) -> List[ListNode]:
    """Every well-formed collection in the graph, by head node"""
    heads = {s for s in graph.subjects(RDF.first, None)} - {o for o in graph.objects(None, RDF.rest)}
    found = []
    for head in sorted(heads):
        try:
            found.append(read_list(graph, head))
        except ValueError:
            logger.warning(f"Ignoring malformed RDF collection at {head}")
    return found


__all__ = [
    "ListNode",
    "Node",
    "Term",
    "Triple",
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
