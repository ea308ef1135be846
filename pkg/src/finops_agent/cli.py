"""Command-line front door: serve, ask, eval, seed, and validate.

Each subcommand is a thin client over the library modules: serve hosts
the HTTP service, ask runs a single agent session end to end, eval
drives the benchmark runner, seed materializes the packaged data files,
and validate checks a query file against the unified schema. Stderr
carries diagnostics and progress; stdout carries machine-readable
payloads only.

Exit codes are stable so the tool can be scripted:

    0   success
    1   validation found errors
    2   startup failure (schema, fixtures, backend, bind)
    3   the session halted before completing all stages
    4   the benchmark finished with at least one incomplete backend
    64  usage error
    66  an input file does not exist
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path
from typing import Any

try:
    import tomllib
except ModuleNotFoundError:  # pragma: no cover - 3.10 fallback
    import tomli as tomllib  # type: ignore[no-redef]

from finops_agent.assets import (
    DEFAULT_ALIASES,
    DEFAULT_BANK,
    DEFAULT_FIXTURES,
    DEFAULT_GROUNDTRUTH,
    DEFAULT_SCHEMA,
    SCRIPTS_DIR,
    script_path,
    seed,
)
from finops_agent.errors import FinopsError
from finops_agent.evalharness.benchmark import (
    USE_CASE_QUERY,
    BackendSpec,
    BenchmarkConfig,
    run_benchmark,
)
from finops_agent.evalharness.groundtruth import load_groundtruth
from finops_agent.evalharness.report import render_report
from finops_agent.llm.base import CompletionParams, LlmUnavailableError
from finops_agent.llm.http import HttpChatBackend
from finops_agent.llm.scripted import ScriptedBackend
from finops_agent.nl2graphql.exemplars import load_bank
from finops_agent.orchestrator.session import (
    SessionAbortedError,
    SessionDeps,
    SessionLimits,
    run_session,
)
from finops_agent.orchestrator.transcript import persist_transcript
from finops_agent.schema_core.lexer import GraphQLSyntaxError
from finops_agent.schema_core.query import UnsupportedConstructError, parse_query
from finops_agent.schema_core.sdl import load_unified
from finops_agent.schema_core.validate import ValidationReport, validate_query
from finops_agent.vendors.store import load_fixtures

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_STARTUP = 2
EXIT_INCOMPLETE = 3
EXIT_PARTIAL_EVAL = 4
EXIT_USAGE = 64
EXIT_NOINPUT = 66

ENV_SCHEMA = "SCHEMA_PATH"
ENV_FIXTURES = "FIXTURES_PATH"
ENV_GATEWAY = "GATEWAY_ADDR"

DEFAULT_ADDR = "127.0.0.1:8080"


class _Parser(argparse.ArgumentParser):
    """ArgumentParser that exits 64 on usage errors instead of 2."""

    def error(self, message: str) -> Any:
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _say(message: str) -> None:
    print(message, file=sys.stderr)


def _schema_paths(args: argparse.Namespace) -> tuple[Path, Path]:
    """Schema SDL path plus its alias table (sibling aliases.json wins)."""
    schema = Path(args.schema or os.environ.get(ENV_SCHEMA) or DEFAULT_SCHEMA)
    sibling = schema.parent / "aliases.json"
    aliases = sibling if sibling.is_file() else DEFAULT_ALIASES
    return schema, aliases


def _fixtures_path(args: argparse.Namespace) -> Path:
    return Path(args.fixtures or os.environ.get(ENV_FIXTURES) or DEFAULT_FIXTURES)


def _load_schema(args: argparse.Namespace):
    schema_path, aliases_path = _schema_paths(args)
    return load_unified(schema_path, aliases_path)


def _resolve_script(value: str) -> Path:
    """A script argument is a file path or the bare name of a packaged script."""
    direct = Path(value)
    if direct.is_file():
        return direct
    packaged = script_path(value)
    if packaged.is_file():
        return packaged
    raise FileNotFoundError(f"no scripted-backend file {value!r} (looked for {direct} and {packaged})")


def _make_ask_backend(selection: str):
    """Parse --backend {scripted:<path>|http} into a live backend."""
    if selection == "http":
        return HttpChatBackend.from_env()
    if selection.startswith("scripted:"):
        path = _resolve_script(selection.split(":", 1)[1])
        return ScriptedBackend.from_file(path)
    raise ValueError(f"unknown backend {selection!r}; expected 'http' or 'scripted:<path>'")


def _parse_addr(value: str) -> tuple[str, int]:
    host, sep, port = value.rpartition(":")
    if not sep or not host:
        raise ValueError(f"address must look like host:port, got {value!r}")
    return host, int(port)


def _report_payload(report: ValidationReport) -> dict[str, Any]:
    return {
        "valid": report.valid,
        "errors": [{"code": e.code, "path": e.path, "message": e.message} for e in report.errors],
        "resolved_aliases": dict(report.resolved_aliases),
    }


def cmd_validate(args: argparse.Namespace) -> int:
    query_file = Path(args.query_file)
    if not query_file.is_file():
        _say(f"error: no such file: {query_file}")
        return EXIT_NOINPUT
    try:
        schema = _load_schema(args)
    except (FinopsError, OSError) as exc:
        _say(f"error: {exc}")
        return EXIT_STARTUP
    text = query_file.read_text(encoding="utf-8")
    try:
        doc = parse_query(text)
    except GraphQLSyntaxError as exc:
        payload = {
            "valid": False,
            "errors": [{"code": "SyntaxError", "path": "$", "message": str(exc)}],
            "resolved_aliases": {},
        }
        print(json.dumps(payload, indent=2))
        return EXIT_INVALID
    except UnsupportedConstructError as exc:
        payload = {
            "valid": False,
            "errors": [{"code": "UnsupportedConstruct", "path": "$", "message": str(exc)}],
            "resolved_aliases": {},
        }
        print(json.dumps(payload, indent=2))
        return EXIT_INVALID
    report = validate_query(doc, schema)
    print(json.dumps(_report_payload(report), indent=2))
    return EXIT_OK if report.valid else EXIT_INVALID


def cmd_ask(args: argparse.Namespace) -> int:
    query = args.query.strip()
    if not query:
        _say("error: the query must be nonempty")
        return EXIT_USAGE
    if args.backend != "http" and not args.backend.startswith("scripted:"):
        _say(f"error: unknown backend {args.backend!r}; expected 'http' or 'scripted:<path>'")
        return EXIT_USAGE
    try:
        schema = _load_schema(args)
        store = load_fixtures(_fixtures_path(args))
        bank = load_bank(DEFAULT_BANK, schema)
        backend = _make_ask_backend(args.backend)
    except (FinopsError, OSError, ValueError) as exc:
        _say(f"error: {exc}")
        return EXIT_STARTUP

    verbose = args.verbose > 0

    def trace(kind: str, payload: dict) -> None:
        if kind == "stage_marker":
            _say(f"stage: {payload['stage']}")
        elif kind == "iteration" and verbose:
            name = payload.get("action_name") or ""
            _say(f"  iteration {payload['index']}: {payload['action_kind']} {name}".rstrip())
        elif kind == "record" and verbose:
            _say(f"  record: {payload['short_description']} ({payload['estimated_savings']})")
        elif kind == "error":
            _say(f"  error: {payload['message']}")

    deps = SessionDeps(schema=schema, store=store, backend=backend, bank=bank, on_event=trace)
    limits = SessionLimits()
    if args.max_iterations is not None:
        limits = SessionLimits(max_iterations=args.max_iterations)
    try:
        transcript = run_session(query, deps, limits=limits)
    except SessionAbortedError as exc:
        _say(f"error: session aborted: {exc}")
        transcript = exc.transcript

    out_dir = Path(args.out or "runs")
    transcript_path, records_path = persist_transcript(transcript, out_dir)
    summary = {
        "session_id": transcript.session_id,
        "model_id": transcript.model_id,
        "completed": transcript.completed,
        "halt_reason": transcript.halt_reason,
        "stage_markers": list(transcript.stage_markers),
        "iterations": len(transcript.iterations),
        "record_count": len(transcript.recommendations),
        "wall_time_seconds": transcript.wall_time_seconds,
        "transcript_path": str(transcript_path),
        "records_path": str(records_path),
    }
    print(json.dumps(summary, indent=2))
    return EXIT_OK if transcript.completed else EXIT_INCOMPLETE


def _backend_specs(entries: list[dict[str, Any]]) -> list[BackendSpec]:
    specs: list[BackendSpec] = []
    for i, entry in enumerate(entries):
        name = entry.get("name")
        kind = entry.get("kind")
        if not isinstance(name, str) or not name:
            raise ValueError(f"backends[{i}]: missing name")
        if kind == "scripted":
            script = entry.get("script")
            if not isinstance(script, str) or not script:
                raise ValueError(f"backends[{i}]: scripted backends need a script")
            path = _resolve_script(script)
            specs.append(
                BackendSpec(
                    name=name,
                    factory=lambda p=path, n=name: ScriptedBackend.from_file(p, model_id=n),
                )
            )
        elif kind == "http":
            HttpChatBackend.from_env()  # fail fast when the endpoint is not configured
            specs.append(BackendSpec(name=name, factory=HttpChatBackend.from_env))
        else:
            raise ValueError(f"backends[{i}]: unknown kind {kind!r}; expected 'scripted' or 'http'")
    return specs


def cmd_eval(args: argparse.Namespace) -> int:
    settings: dict[str, Any] = {}
    if args.config:
        config_path = Path(args.config)
        if not config_path.is_file():
            _say(f"error: no such file: {config_path}")
            return EXIT_NOINPUT
        try:
            settings = tomllib.loads(config_path.read_text(encoding="utf-8"))
        except tomllib.TOMLDecodeError as exc:
            _say(f"error: {config_path}: {exc}")
            return EXIT_USAGE

    entries = settings.get("backends", [])
    if args.backend:
        if args.backend == "http":
            entries = [{"name": "http", "kind": "http"}]
        elif args.backend.startswith("scripted:"):
            script = args.backend.split(":", 1)[1]
            entries = [{"name": Path(script).stem, "kind": "scripted", "script": script}]
        else:
            _say(f"error: unknown backend {args.backend!r}; expected 'http' or 'scripted:<path>'")
            return EXIT_USAGE
    if not entries:
        _say("error: no backends configured; pass --config or --backend")
        return EXIT_USAGE

    n_runs = args.n_runs if args.n_runs is not None else int(settings.get("n_runs", 10))
    if n_runs < 1:
        _say(f"error: n_runs must be >= 1, got {n_runs}")
        return EXIT_USAGE
    parallelism = int(settings.get("parallelism", 1))
    out_dir = Path(args.out or settings.get("out_dir", "eval-out"))
    user_query = settings.get("user_query", USE_CASE_QUERY)

    try:
        schema = _load_schema(args)
        store = load_fixtures(_fixtures_path(args))
        bank = load_bank(DEFAULT_BANK, schema)
        groundtruth = load_groundtruth(Path(settings.get("groundtruth", DEFAULT_GROUNDTRUTH)))
        specs = _backend_specs(entries)
        config = BenchmarkConfig(
            backends=tuple(specs),
            schema=schema,
            store=store,
            groundtruth=groundtruth,
            n_runs=n_runs,
            parallelism=parallelism,
            user_query=user_query,
            limits=SessionLimits(),
            params=CompletionParams(),
            bank=bank,
            out_dir=out_dir,
        )
    except (FinopsError, OSError, ValueError) as exc:
        _say(f"error: {exc}")
        return EXIT_STARTUP

    outcome = run_benchmark(config)
    markdown, csv_text = render_report(outcome.table)
    out_dir.mkdir(parents=True, exist_ok=True)
    report_md = out_dir / "report.md"
    report_csv = out_dir / "report.csv"
    report_md.write_text(markdown, encoding="utf-8")
    report_csv.write_text(csv_text, encoding="utf-8")
    summary = {
        "report_md": str(report_md),
        "report_csv": str(report_csv),
        "runs_dir": str(out_dir / "runs"),
        "incomplete_backends": list(outcome.incomplete_backends),
        "all_complete": outcome.all_complete,
    }
    print(json.dumps(summary, indent=2))
    return EXIT_OK if outcome.all_complete else EXIT_PARTIAL_EVAL


def cmd_serve(args: argparse.Namespace) -> int:
    from finops_agent.service.app import ServiceConfig, create_app

    addr = os.environ.get(ENV_GATEWAY, DEFAULT_ADDR)
    try:
        host, port = _parse_addr(addr)
    except ValueError as exc:
        _say(f"error: {ENV_GATEWAY}: {exc}")
        return EXIT_USAGE
    if args.host:
        host = args.host
    if args.port is not None:
        port = args.port

    backend = args.backend or "scripted"
    scripts_dir = SCRIPTS_DIR
    if backend.startswith("scripted:"):
        scripts_dir = Path(backend.split(":", 1)[1])
        backend = "scripted"
    if backend not in ("scripted", "http"):
        _say(f"error: unknown backend {backend!r}; expected 'http', 'scripted', or 'scripted:<dir>'")
        return EXIT_USAGE

    schema_path, aliases_path = _schema_paths(args)
    config = ServiceConfig(
        schema_path=schema_path,
        aliases_path=aliases_path,
        fixtures_path=_fixtures_path(args),
        scripts_dir=scripts_dir,
        backend=backend,
    )
    try:
        app = create_app(config)
    except (FinopsError, OSError) as exc:
        _say(f"error: {exc}")
        return EXIT_STARTUP

    import uvicorn

    _say(f"serving on http://{host}:{port}")
    try:
        uvicorn.run(app, host=host, port=port, log_level="info" if args.verbose else "warning")
    except OSError as exc:
        _say(f"error: {exc}")
        return EXIT_STARTUP
    except SystemExit as exc:
        if exc.code not in (0, None):
            return EXIT_STARTUP
    return EXIT_OK


def cmd_seed(args: argparse.Namespace) -> int:
    dest = Path(args.out or "finops-data")
    try:
        created = seed(dest, overwrite=args.overwrite)
    except OSError as exc:
        _say(f"error: {exc}")
        return EXIT_STARTUP
    if args.verbose:
        for path in created:
            _say(f"wrote {path}")
    print(json.dumps({"dest": str(dest), "files_written": len(created)}, indent=2))
    return EXIT_OK


def build_parser() -> _Parser:
    parser = _Parser(prog="finops-agent", description="FinOps agent toolkit")

    shared = _Parser(add_help=False)
    shared.add_argument("--schema", help="unified schema SDL path (env SCHEMA_PATH)")
    shared.add_argument("--fixtures", help="vendor fixtures directory (env FIXTURES_PATH)")
    shared.add_argument("-v", "--verbose", action="count", default=0, help="chattier stderr")

    sub = parser.add_subparsers(dest="subcommand", required=True, parser_class=_Parser)

    p_serve = sub.add_parser("serve", parents=[shared], help="host the gateway and session API")
    p_serve.add_argument("--host", help="bind host (overrides GATEWAY_ADDR)")
    p_serve.add_argument("--port", type=int, help="bind port (overrides GATEWAY_ADDR)")
    p_serve.add_argument("--backend", help="http, scripted, or scripted:<scripts dir>")
    p_serve.set_defaults(func=cmd_serve)

    p_ask = sub.add_parser("ask", parents=[shared], help="run one agent session")
    p_ask.add_argument("query", help="natural-language request")
    p_ask.add_argument("--backend", default="http", help="http or scripted:<script file>")
    p_ask.add_argument("--out", help="directory for the transcript and records (default runs)")
    p_ask.add_argument("--max-iterations", type=int, help="iteration cap for the session")
    p_ask.set_defaults(func=cmd_ask)

    p_eval = sub.add_parser("eval", parents=[shared], help="run the benchmark and write reports")
    p_eval.add_argument("--config", help="TOML config: backends, n_runs, parallelism, out_dir")
    p_eval.add_argument("--backend", help="shortcut for a single backend: http or scripted:<path>")
    p_eval.add_argument("--n-runs", type=int, help="runs per backend (overrides config)")
    p_eval.add_argument("--out", help="report directory (overrides config)")
    p_eval.set_defaults(func=cmd_eval)

    p_seed = sub.add_parser("seed", parents=[shared], help="copy packaged data files to disk")
    p_seed.add_argument("--out", help="destination directory (default finops-data)")
    p_seed.add_argument("--overwrite", action="store_true", help="replace existing files")
    p_seed.set_defaults(func=cmd_seed)

    p_validate = sub.add_parser("validate", parents=[shared], help="validate a query file")
    p_validate.add_argument("query_file", help="file holding one GraphQL query")
    p_validate.set_defaults(func=cmd_validate)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code else EXIT_OK
    try:
        return args.func(args)
    except LlmUnavailableError as exc:
        _say(f"error: {exc}")
        return EXIT_STARTUP
    except FinopsError as exc:
        _say(f"error: {exc}")
        return EXIT_STARTUP


if __name__ == "__main__":
    sys.exit(main())
