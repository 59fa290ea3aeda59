"""Command-line entry point: ingest a collection, serve the API, generate
fixtures, dump the API schema.

Exit codes: 2 for configuration/validation failures, 3 when the service
port is already in use.

A config file may hold the same settings as flags (one `key = value` pair
per line, `#` comments); flags win over the file. List-valued keys
(`dict`, `gazetteer`, `ref`) take comma-separated specs.
"""

from __future__ import annotations

import argparse
import json
import socket
import sys
from pathlib import Path

EXIT_CONFIG = 2
EXIT_PORT_BUSY = 3


def _parse_dict_spec(spec: str) -> tuple[str, Path, str]:
    """name=path[:lang]"""
    name, sep, rest = spec.partition("=")
    if not sep or not name or not rest:
        raise ValueError(f"bad dictionary spec '{spec}', expected name=path[:lang]")
    path, colon, lang = rest.rpartition(":")
    if colon and lang and "/" not in lang and path:
        return name, Path(path), lang
    return name, Path(rest), "any"


def _parse_ref_spec(spec: str) -> tuple[str, Path]:
    """lang=path"""
    lang, sep, path = spec.partition("=")
    if not sep or not lang or not path:
        raise ValueError(f"bad reference spec '{spec}', expected lang=path")
    return lang, Path(path)


def read_config_file(path: Path) -> dict[str, str]:
    values: dict[str, str] = {}
    for lineno, line in enumerate(path.read_text(encoding="utf-8").splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise ValueError(f"{path}:{lineno}: expected 'key = value'")
        values[key.strip()] = value.strip()
    return values


def _build_pipeline_config(args) -> "PipelineConfig":
    from .pipeline import PipelineConfig

    file_values: dict[str, str] = {}
    if args.config:
        file_values = read_config_file(Path(args.config))

    def setting(flag_value, key: str, default=None):
        if flag_value is not None:
            return flag_value
        if key in file_values:
            return file_values[key]
        return default

    input_dir = setting(args.input, "input")
    index_dir = setting(args.index, "index")
    if not input_dir or not index_dir:
        raise ValueError("both --input and --index are required")

    dict_specs = list(args.dict or [])
    if not dict_specs and "dict" in file_values:
        dict_specs = [s.strip() for s in file_values["dict"].split(",") if s.strip()]
    gazetteers = list(args.gazetteer or [])
    if not gazetteers and "gazetteer" in file_values:
        gazetteers = [s.strip() for s in file_values["gazetteer"].split(",") if s.strip()]
    ref_specs = list(args.ref or [])
    if not ref_specs and "ref" in file_values:
        ref_specs = [s.strip() for s in file_values["ref"].split(",") if s.strip()]

    return PipelineConfig(
        input_dir=Path(input_dir),
        index_dir=Path(index_dir),
        collection_name=setting(args.name, "name", "collection"),
        dictionaries=[_parse_dict_spec(s) for s in dict_specs],
        gazetteers=[Path(p) for p in gazetteers],
        reference_stats=dict(_parse_ref_spec(s) for s in ref_specs),
        workers=int(setting(args.workers, "workers", 1)),
        paragraph_languages=bool(
            args.paragraph_lang or file_values.get("paragraph_lang") == "true"
        ),
        ll_threshold=float(setting(args.ll_threshold, "ll_threshold", 3.84)),
        dice_threshold=float(setting(args.dice_threshold, "dice_threshold", 0.5)),
        ner_confidence=float(setting(args.ner_confidence, "ner_confidence", 0.5)),
        nodes_per_type=int(setting(args.nodes_per_type, "nodes_per_type", 15)),
        min_edge_weight=int(setting(args.min_edge_weight, "min_edge_weight", 2)),
        keyterm_limit=int(setting(args.keyterm_limit, "keyterm_limit", 15)),
    )


def cmd_ingest(args) -> int:
    from .pipeline import PipelineError, run_pipeline

    try:
        config = _build_pipeline_config(args)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        report = run_pipeline(config)
    except PipelineError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    print(report.format_text())
    return 0


def cmd_serve(args) -> int:
    import signal

    import uvicorn

    from .api import create_app
    from .index import Index, IndexStoreError

    try:
        index = Index.open(Path(args.index))
    except (IndexStoreError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    sock = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
    sock.setsockopt(socket.SOL_SOCKET, socket.SO_REUSEADDR, 1)
    try:
        sock.bind((args.host, args.port))
    except OSError as exc:
        print(f"error: cannot bind port {args.port}: {exc}", file=sys.stderr)
        sock.close()
        return EXIT_PORT_BUSY
    sock.listen(128)

    app = create_app(index, ui_dir=args.ui_dir)
    config = uvicorn.Config(app, host=args.host, port=args.port, log_level="warning")
    server = uvicorn.Server(config)
    # Exit cleanly on SIGTERM: uvicorn drains in-flight requests, then
    # re-raises the captured signal, which must land in a benign handler.
    signal.signal(signal.SIGTERM, lambda _sig, _frame: setattr(server, "should_exit", True))
    print(f"serving collection '{index.name}' on http://{args.host}:{args.port}")
    server.run(sockets=[sock])
    return 0


def cmd_fixture(args) -> int:
    from .fixtures import generate_fixture

    info = generate_fixture(Path(args.out), doc_count=args.docs, seed=args.seed)
    print(json.dumps(info, indent=2, sort_keys=True))
    return 0


def cmd_openapi(args) -> int:
    from .api import create_app
    from .index import Index

    app = create_app(Index.create(None))
    schema = json.dumps(app.openapi(), indent=2, sort_keys=True) + "\n"
    if args.out:
        Path(args.out).write_text(schema, encoding="utf-8")
    else:
        print(schema, end="")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="corpuscope",
        description="multilingual extraction pipeline and exploration service",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    ingest = sub.add_parser("ingest", help="run the pipeline over a collection")
    ingest.add_argument("--input", help="collection root directory")
    ingest.add_argument("--index", help="output index directory")
    ingest.add_argument("--name", help="collection name")
    ingest.add_argument("--config", help="config file (key = value lines)")
    ingest.add_argument(
        "--dict", action="append", metavar="NAME=PATH[:LANG]",
        help="dictionary file (repeatable)",
    )
    ingest.add_argument(
        "--gazetteer", action="append", metavar="PATH", help="gazetteer file (repeatable)"
    )
    ingest.add_argument(
        "--ref", action="append", metavar="LANG=PATH",
        help="reference stats file per language (repeatable)",
    )
    ingest.add_argument("--workers", type=int, default=None)
    ingest.add_argument(
        "--paragraph-lang", action="store_true", default=None,
        help="detect language per paragraph",
    )
    ingest.add_argument("--ll-threshold", type=float, default=None)
    ingest.add_argument("--dice-threshold", type=float, default=None)
    ingest.add_argument("--ner-confidence", type=float, default=None)
    ingest.add_argument("--nodes-per-type", type=int, default=None)
    ingest.add_argument("--min-edge-weight", type=int, default=None)
    ingest.add_argument("--keyterm-limit", type=int, default=None)
    ingest.set_defaults(func=cmd_ingest)

    serve = sub.add_parser("serve", help="serve the API over an existing index")
    serve.add_argument("--index", required=True)
    serve.add_argument("--port", type=int, default=8000)
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--ui-dir", help="static UI bundle served under /ui")
    serve.set_defaults(func=cmd_serve)

    fixture = sub.add_parser("fixture", help="generate the synthetic fixture corpus")
    fixture.add_argument("--out", required=True)
    fixture.add_argument("--docs", type=int, default=1000)
    fixture.add_argument("--seed", type=int, default=42)
    fixture.set_defaults(func=cmd_fixture)

    openapi = sub.add_parser("openapi", help="dump the API schema")
    openapi.add_argument("--out", help="write to this path instead of stdout")
    openapi.set_defaults(func=cmd_openapi)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
