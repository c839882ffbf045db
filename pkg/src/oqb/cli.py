"""Command-line driver: inspect ontologies, translate and run query documents,
and launch the HTTP service.

Exit codes: 0 on success, 1 on domain errors (parse or validation failures),
2 on usage errors including unreadable input files. `serve` is the one
exception pinned differently: a missing or invalid registry file exits 1.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import ontology as ont
from .errors import OqbError, Severity
from .graph import validate
from .persistence import load_document
from .sparql import SparqlQuery, parse_sparql, serialize, translate
from .store import evaluate, format_table, load_ntriples


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except OqbError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="oqb",
        description="Ontology-driven graph query builder over an embedded triple registry.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    inspect = sub.add_parser("inspect", help="list an ontology's classes and properties")
    inspect.add_argument("owl", help="RDF/XML ontology file")
    mode = inspect.add_mutually_exclusive_group()
    mode.add_argument("--classes", action="store_true", help="list classes (default)")
    mode.add_argument("--properties", action="store_true", help="list properties")
    mode.add_argument("--tree", action="store_true", help="print the subclass hierarchy")
    inspect.set_defaults(func=cmd_inspect)

    trans = sub.add_parser("translate", help="translate a query document to SPARQL")
    trans.add_argument("document", help=".oqb query document")
    trans.add_argument("--ontology", required=True, help="RDF/XML ontology file")
    trans.add_argument("-o", "--output", help="output .rq path (default: stdout)")
    trans.set_defaults(func=cmd_translate)

    run = sub.add_parser("run", help="execute a query against a registry file")
    run.add_argument("query", help=".oqb document or .rq SPARQL file")
    run.add_argument("--data", required=True, help="N-Triples registry file")
    run.add_argument("--ontology", help="ontology file (required for .oqb input)")
    run.set_defaults(func=cmd_run)

    serve = sub.add_parser("serve", help="start the HTTP service")
    serve.add_argument("--registry", required=True, help="N-Triples registry file")
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--port", type=int, default=8000)
    serve.add_argument("--assets", help="static asset directory for the UI bundle")
    serve.add_argument("--node-cap", type=int, default=12, dest="node_cap")
    serve.add_argument("--session-ttl", type=float, default=3600.0, dest="session_ttl")
    serve.set_defaults(func=cmd_serve)

    return parser


def cmd_inspect(args: argparse.Namespace) -> int:
    data = Path(args.owl).read_bytes()
    catalog = ont.parse_ontology(data, source_name=Path(args.owl).name)
    for diag in catalog.diagnostics:
        print(f"{diag.severity.value}: {diag.code}: {diag.message}", file=sys.stderr)

    if args.properties:
        for prop in ont.list_properties(catalog):
            line = f"{_display(catalog, prop.iri)} [{prop.kind.value}]"
            if prop.domains:
                line += " domain=" + ",".join(_display(catalog, d) for d in sorted(prop.domains))
            if prop.ranges:
                line += " range=" + ",".join(_display(catalog, r) for r in sorted(prop.ranges))
            print(line)
    elif args.tree:
        for line in _tree_lines(catalog):
            print(line)
    else:
        for cls in ont.list_classes(catalog):
            print(_class_line(catalog, cls.iri))
    return 0


def _display(catalog: ont.Ontology, iri: str) -> str:
    return ont.curie_of(catalog, iri) or iri


def _class_line(catalog: ont.Ontology, iri: str) -> str:
    label = catalog.classes[iri].label
    text = _display(catalog, iri)
    return f"{text} ({label})" if label else text


def _tree_lines(catalog: ont.Ontology) -> list[str]:
    children: dict[str, list[str]] = {}
    roots: list[str] = []
    for cls in ont.list_classes(catalog):
        if cls.parents:
            for parent in sorted(cls.parents):
                children.setdefault(parent, []).append(cls.iri)
        else:
            roots.append(cls.iri)

    lines: list[str] = []

    def walk(iri: str, depth: int) -> None:
        lines.append("  " * depth + _class_line(catalog, iri))
        for child in children.get(iri, []):
            walk(child, depth + 1)

    for root in roots:
        walk(root, 0)
    return lines


def cmd_translate(args: argparse.Namespace) -> int:
    document = load_document(Path(args.document).read_bytes())
    catalog = ont.parse_ontology(
        Path(args.ontology).read_bytes(), source_name=Path(args.ontology).name
    )

    diagnostics = validate(document.graph, catalog, strict=True)
    for diag in diagnostics:
        print(f"{diag.severity.value}: {diag.code}: {diag.message}", file=sys.stderr)
    if any(d.severity is Severity.ERROR for d in diagnostics):
        return 1

    text = serialize(translate(document.graph, catalog))
    if args.output:
        Path(args.output).write_bytes(text.encode("utf-8"))
    else:
        sys.stdout.write(text)
    return 0


def cmd_run(args: argparse.Namespace) -> int:
    query = _load_query(args)
    store = load_ntriples(Path(args.data).read_bytes())
    table = evaluate(query, store)
    sys.stdout.write(format_table(table, query.prefixes))
    return 0


def _load_query(args: argparse.Namespace) -> SparqlQuery:
    path = Path(args.query)
    if path.suffix == ".rq":
        return parse_sparql(path.read_text(encoding="utf-8"))
    if not args.ontology:
        print("error: --ontology is required for query-document input", file=sys.stderr)
        raise SystemExit(2)
    document = load_document(path.read_bytes())
    catalog = ont.parse_ontology(
        Path(args.ontology).read_bytes(), source_name=Path(args.ontology).name
    )
    return translate(document.graph, catalog)


def cmd_serve(args: argparse.Namespace) -> int:
    # Registry problems must surface before the port binds; hence exit 1 here,
    # unlike the other commands' exit-2 policy for unreadable inputs.
    try:
        store = load_ntriples(Path(args.registry).read_bytes())
    except (OSError, OqbError) as exc:
        print(f"error: cannot load registry: {exc}", file=sys.stderr)
        return 1
    if args.assets is not None and not Path(args.assets).is_dir():
        print(f"error: asset directory not found: {args.assets}", file=sys.stderr)
        return 1

    from .service import create_app

    app = create_app(
        store,
        default_node_cap=args.node_cap,
        session_ttl=args.session_ttl,
        assets_dir=args.assets,
    )

    import uvicorn

    try:
        uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    except OSError as exc:
        print(f"error: cannot bind {args.host}:{args.port}: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
