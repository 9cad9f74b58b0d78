"""
Command-line front end
validate, check, serve and bench subcommands over the same library calls
the HTTP service uses
"""
import argparse
import json
import logging
import os
import sys
from pathlib import Path
from typing import List, Optional, Sequence

from rdflib import Graph, URIRef
from rdflib.namespace import RDF

from config import load_settings
from policy.extract import extract_app_policy, extract_data_policies, extract_usage_context
from policy.to_graph import policy_to_graph, usage_context_graph
from rdf.errors import DToUError
from rdf.namespaces import DTOU
from rdf.turtle import parse_turtle, serialize_turtle
from reasoner.conformance import check_conformance
from reasoner.derivation import derive_policies, derive_policy
from reasoner.knowledge_base import assemble
from reasoner.models import KnowledgeBase, unbound_output_uri
from reasoner.obligations import check_obligations
from reasoner.report import (
    DERIVATION_USER,
    conformance_response,
    derivation_response,
    obligation_response,
)

logger = logging.getLogger("dtou.cli")

EXIT_OK = 0
EXIT_CONFLICTS = 1
EXIT_STRUCTURAL = 2
EXIT_IO = 3


def _configure_logging(level: str) -> None:
    logging.basicConfig(
        level=getattr(logging, level.upper(), logging.INFO),
        format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
        stream=sys.stderr,
        force=True
    )


def _read(path: Path) -> str:
    with open(path, "r", encoding="utf-8") as f:
        return f.read()


def _load(path: Path) -> Graph:
    return parse_turtle(_read(path))


def data_files(paths: Sequence[str]) -> List[Path]:
    """Expand directories to their *.ttl files (sorted); keep files as given"""
    files: List[Path] = []
    for raw in paths:
        path = Path(raw)
        if path.is_dir():
            files.extend(sorted(path.glob("*.ttl")))
        else:
            files.append(path)
    return files


def validate_file(path: Path) -> str:
    """
    Parse and extract every policy object a document holds

    Returns:
        One-line summary of what the document contains

    Raises:
        DToUError: syntax or structural error
        OSError: unreadable file
    """
    text = _read(path)
    if not text.strip():
        logger.warning(f"{path} is empty: no policies")
        return f"{path}: empty"
    graph = parse_turtle(text)
    found = []
    data_policies = extract_data_policies(graph)
    if data_policies:
        found.append(f"{len(data_policies)} data policies")
    if (None, RDF.type, DTOU.AppPolicy) in graph:
        app = extract_app_policy(graph)
        found.append(f"app policy {app.name} ({len(app.inputs)} inputs, {len(app.outputs)} outputs)")
    if (None, RDF.type, DTOU.UsageContext) in graph:
        context = extract_usage_context(graph)
        found.append(f"usage context of {context.user}")
    if not found:
        logger.warning(f"{path} holds no policies")
    return f"{path}: {', '.join(found) or 'no policies'}"


def cmd_validate(args: argparse.Namespace) -> int:
    status = EXIT_OK
    for raw in args.files:
        path = Path(raw)
        try:
            print(validate_file(path))
        except OSError as e:
            logger.error(f"Cannot read {path}: {e}")
            status = max(status, EXIT_IO)
        except (DToUError, UnicodeDecodeError) as e:
            print(f"{path}: {e}", file=sys.stderr)
            status = max(status, EXIT_STRUCTURAL)
    return status


def load_knowledge_base(app_path: Path, data_paths: Sequence[str], context_path: Optional[Path],
                        vocab_path: Optional[Path] = None, rdfs_closure: bool = False) -> KnowledgeBase:
    """Read the documents of one `check` run and assemble them"""
    app_graph = _load(app_path)
    if context_path is not None:
        context_graph = _load(context_path)
    else:
        app = extract_app_policy(app_graph)
        context_graph = usage_context_graph(URIRef(DERIVATION_USER), app.id, "")
    data_graphs = [_load(path) for path in data_files(data_paths)]
    vocabulary = _load(vocab_path) if vocab_path is not None else None
    return assemble(context_graph, app_graph, data_graphs, vocabulary=vocabulary, rdfs_closure=rdfs_closure)


def _derive(kb: KnowledgeBase, args: argparse.Namespace) -> int:
    derived = [derive_policy(kb, args.output_port)] if args.output_port else derive_policies(kb)
    uri_of = (lambda port: URIRef(args.target_uri)) if args.target_uri else unbound_output_uri

    if args.format == "json":
        responses = [derivation_response(d, uri_of(d.output_port)).model_dump() for d in derived]
        print(json.dumps(responses, indent=2, ensure_ascii=False))
        return EXIT_OK

    graph = None
    for d in derived:
        graph = policy_to_graph(d.bind(uri_of(d.output_port)), graph)
    print(serialize_turtle(graph) if graph is not None else "", end="")
    return EXIT_OK


def cmd_check(args: argparse.Namespace) -> int:
    if args.task != "derive" and args.context is None:
        logger.error(f"--context is required for task {args.task}")
        return EXIT_STRUCTURAL
    if args.task != "derive" and args.format == "turtle":
        logger.warning("Reports are JSON only; --format turtle applies to derive")
    try:
        kb = load_knowledge_base(
            Path(args.app), args.data, Path(args.context) if args.context else None,
            Path(args.vocab) if args.vocab else None, args.rdfs_closure,
        )
        if args.task == "derive":
            return _derive(kb, args)
        if args.task == "obligations":
            report = obligation_response(kb, check_obligations(kb))
            print(json.dumps(report.model_dump(), indent=2, ensure_ascii=False))
            return EXIT_OK
        report = conformance_response(kb, check_conformance(kb), strict=args.strict)
        print(json.dumps(report.model_dump(), indent=2, ensure_ascii=False))
        return EXIT_OK if report.permitted else EXIT_CONFLICTS
    except OSError as e:
        logger.error(f"I/O error: {e}")
        return EXIT_IO
    except (DToUError, UnicodeDecodeError) as e:
        logger.error(f"Invalid policy document: {e}")
        return EXIT_STRUCTURAL


def cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    if args.store:
        os.environ["DTOU_STORE"] = args.store
    if args.listen:
        os.environ["DTOU_LISTEN"] = args.listen
    if args.strict:
        os.environ["DTOU_STRICT"] = "true"
    settings = load_settings()
    host, port = settings.listen_address()
    logger.info(f"Starting service on {host}:{port} (store={settings.store_dir}, strict={settings.strict})")
    uvicorn.run("main:app", host=host, port=port)
    return EXIT_OK


def cmd_bench(args: argparse.Namespace) -> int:
    from benchmark.excel_export import records_to_excel
    from benchmark.generator import Variable, WorkloadSpec
    from benchmark.records import emit_csv
    from benchmark.runner import run_benchmark

    try:
        values = [int(v) for v in args.values.split(",") if v.strip()]
        spec = WorkloadSpec(
            variable=Variable(args.variable),
            values=values,
            repeats=args.repeats,
            seed=args.seed,
            timeout=args.timeout,
            track_memory=args.track_memory,
            subtasks=args.subtasks,
            endpoint=args.endpoint,
        )
    except ValueError as e:
        logger.error(f"Invalid benchmark parameters: {e}")
        return EXIT_STRUCTURAL

    records = run_benchmark(spec)
    try:
        emit_csv(records, args.out)
        if args.excel:
            records_to_excel(records, args.excel, {"Variable": spec.variable.value, "Seed": spec.seed})
    except OSError as e:
        logger.error(f"Cannot write benchmark results: {e}")
        return EXIT_IO
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="dtou", description="Data Terms of Use policy engine")
    parser.add_argument("--log-level", default=None, help="Logging level (default: DTOU_LOG_LEVEL or INFO)")
    sub = parser.add_subparsers(dest="command", required=True)

    validate = sub.add_parser("validate", help="Parse and extract policy documents")
    validate.add_argument("files", nargs="+")
    validate.set_defaults(func=cmd_validate)

    check = sub.add_parser("check", help="Run a reasoning task on local documents")
    check.add_argument("--app", required=True, help="App policy document")
    check.add_argument("--data", nargs="*", default=[], help="Data policy documents or directories of them")
    check.add_argument("--context", help="Usage context document (not needed for derive)")
    check.add_argument("--task", choices=["conformance", "obligations", "derive"], default="conformance")
    check.add_argument("--strict", action="store_true", help="Inputs without a data policy deny usage")
    check.add_argument("--rdfs-closure", action="store_true", help="Match descriptors through rdfs:subClassOf")
    check.add_argument("--vocab", help="Vocabulary document contributing rdfs:subClassOf triples")
    check.add_argument("--format", choices=["json", "turtle"], default=None,
                       help="Report format (json for reports, turtle for derived policies)")
    check.add_argument("--output-port", help="Derive only this output port")
    check.add_argument("--target-uri", help="Data uri to bind derived policies to")
    check.set_defaults(func=cmd_check)

    serve = sub.add_parser("serve", help="Start the HTTP compliance service")
    serve.add_argument("--store", help="Store directory (default: DTOU_STORE)")
    serve.add_argument("--listen", help="host:port (default: DTOU_LISTEN)")
    serve.add_argument("--strict", action="store_true")
    serve.set_defaults(func=cmd_serve)

    bench = sub.add_parser("bench", help="Run a benchmark sweep")
    bench.add_argument("--variable", required=True, help="e.g. data:tag:numSecurity")
    bench.add_argument("--values", default="10,100,1000", help="Comma-separated counts")
    bench.add_argument("--repeats", type=int, default=10)
    bench.add_argument("--seed", type=int, default=0)
    bench.add_argument("--out", required=True, help="CSV output path")
    bench.add_argument("--timeout", type=float, default=60.0, help="Per-run timeout in seconds")
    bench.add_argument("--excel", help="Also write an Excel workbook here")
    bench.add_argument("--endpoint", help="Time a running service at this base URL instead")
    bench.add_argument("--subtasks", action="store_true", help="Also time each conflict kind")
    bench.add_argument("--track-memory", action="store_true", help="Record peak memory")
    bench.set_defaults(func=cmd_bench)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    _configure_logging(args.log_level or load_settings().log_level)
    if args.command == "check" and args.format is None:
        args.format = "turtle" if args.task == "derive" else "json"
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
