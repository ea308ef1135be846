"""The HTTP service: federated /graphql plus the streaming session API.

All handlers read immutable schema and store state loaded at startup;
per-session mutable state lives in the SessionManager. GraphQL-level
failures (syntax, validation, data faults) are always HTTP 200 with the
error inside the body; non-200 is reserved for transport concerns.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterator

from fastapi import FastAPI, HTTPException, Request, Response
from fastapi.responses import JSONResponse, StreamingResponse
from fastapi.staticfiles import StaticFiles

from finops_agent.assets import (
    DEFAULT_ALIASES,
    DEFAULT_BANK,
    DEFAULT_FIXTURES,
    DEFAULT_SCHEMA,
    SCRIPTS_DIR,
)
from finops_agent.gateway.execute import execute_query
from finops_agent.llm.base import LlmBackend
from finops_agent.llm.http import HttpChatBackend
from finops_agent.llm.scripted import ScriptedBackend
from finops_agent.nl2graphql.exemplars import load_bank
from finops_agent.orchestrator.session import SessionLimits
from finops_agent.schema_core.lexer import GraphQLSyntaxError
from finops_agent.schema_core.query import UnsupportedConstructError, parse_query
from finops_agent.schema_core.sdl import load_unified
from finops_agent.schema_core.validate import validate_query
from finops_agent.service.models import (
    FollowupRequest,
    GraphqlRequest,
    GraphqlResponse,
    HealthResponse,
    PathError,
    SessionCreated,
    SessionRequest,
    SessionSummary,
)
from finops_agent.service.sessions import (
    SessionEvent,
    SessionManager,
    SessionNotFoundError,
    SessionNotReadyError,
    SessionRun,
    UnknownScriptError,
)
from finops_agent.vendors.store import load_fixtures

SSE_POLL_SECONDS = 0.5


def _default_console_dir() -> Path | None:
    """The checked-out browser console, when this install is an editable checkout."""
    candidate = Path(__file__).resolve().parents[3] / "frontend"
    return candidate if (candidate / "index.html").is_file() else None


@dataclass
class ServiceConfig:
    schema_path: Path = DEFAULT_SCHEMA
    aliases_path: Path = DEFAULT_ALIASES
    fixtures_path: Path = DEFAULT_FIXTURES
    bank_path: Path | None = DEFAULT_BANK
    scripts_dir: Path = SCRIPTS_DIR
    backend: str = "scripted"  # scripted | http
    default_script: str = "demo_session"
    limits: SessionLimits = field(default_factory=SessionLimits)
    console_dir: Path | None = field(default_factory=_default_console_dir)


class ServiceState:
    """Fixture-backed state; handlers must not touch it before load()."""

    def __init__(self, config: ServiceConfig):
        self.config = config
        self.ready = False
        self.schema = None
        self.store = None
        self.manager: SessionManager | None = None

    def load(self) -> None:
        config = self.config
        self.schema = load_unified(config.schema_path, config.aliases_path)
        self.store = load_fixtures(config.fixtures_path)
        bank = load_bank(config.bank_path, self.schema) if config.bank_path else None
        self.manager = SessionManager(
            self.schema,
            self.store,
            backend_factory=self.make_backend,
            bank=bank,
            limits=config.limits,
        )
        self.ready = True

    def make_backend(self, script: str | None) -> LlmBackend:
        if self.config.backend == "http":
            if script is not None:
                raise UnknownScriptError("per-session scripts need the scripted backend")
            return HttpChatBackend.from_env()
        name = script or self.config.default_script
        safe = Path(name).name
        if not safe.endswith(".json"):
            safe += ".json"
        path = self.config.scripts_dir / safe
        if not path.is_file():
            raise UnknownScriptError(f"no script file {safe!r} under {self.config.scripts_dir}")
        return ScriptedBackend.from_file(path)


def _sse_line(event: SessionEvent) -> str:
    data = json.dumps(dict(event.payload), ensure_ascii=False, separators=(",", ":"))
    return f"id: {event.seq}\nevent: {event.kind}\ndata: {data}\n\n"


def _event_stream(run: SessionRun, after: int) -> Iterator[str]:
    cursor = after
    while True:
        events, done = run.wait_events(cursor, timeout=SSE_POLL_SECONDS)
        for event in events:
            yield _sse_line(event)
            cursor = event.seq
        if done and cursor >= run.event_count():
            return


def create_app(config: ServiceConfig | None = None, preload: bool = True) -> FastAPI:
    """Build the service; preload=False defers fixture loading (healthz stays 503)."""
    state = ServiceState(config or ServiceConfig())
    app = FastAPI(title="finops-agent")
    app.state.service = state
    if preload:
        state.load()

    def require_ready() -> ServiceState:
        if not state.ready:
            raise HTTPException(status_code=503, detail="fixtures not loaded")
        return state

    def get_run(session_id: str) -> SessionRun:
        require_ready()
        try:
            return state.manager.get(session_id)
        except SessionNotFoundError as exc:
            raise HTTPException(status_code=404, detail=str(exc)) from None

    @app.get("/healthz", response_model=HealthResponse)
    def healthz() -> JSONResponse:
        if not state.ready:
            return JSONResponse(status_code=503, content={"status": "loading"})
        return JSONResponse(content={"status": "ok"})

    @app.post("/graphql", response_model=GraphqlResponse)
    def graphql(body: GraphqlRequest) -> GraphqlResponse:
        svc = require_ready()
        if body.variables:
            return GraphqlResponse(
                data=None,
                errors=[PathError(path="", message="variables are not supported; inline literal arguments")],
            )
        try:
            doc = parse_query(body.query)
        except GraphQLSyntaxError as exc:
            return GraphqlResponse(data=None, errors=[PathError(path="", message=f"Syntax error: {exc}")])
        except UnsupportedConstructError as exc:
            return GraphqlResponse(data=None, errors=[PathError(path="", message=str(exc))])
        report = validate_query(doc, svc.schema)
        if not report.valid:
            return GraphqlResponse(
                data=None,
                errors=[PathError(path=i.path, message=f"{i.code}: {i.message}") for i in report.errors],
            )
        result = execute_query(doc, svc.schema, svc.store)
        return GraphqlResponse(
            data=result.data,
            errors=[PathError(path=e.path, message=e.message) for e in result.errors],
        )

    @app.post("/sessions", response_model=SessionCreated, status_code=201)
    def start_session(body: SessionRequest) -> SessionCreated:
        svc = require_ready()
        if not body.query.strip():
            raise HTTPException(status_code=422, detail="query must not be empty")
        try:
            run = svc.manager.start(body.query, script=body.script, max_iterations=body.max_iterations)
        except UnknownScriptError as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from None
        return SessionCreated(session_id=run.session_id)

    @app.get("/sessions/{session_id}", response_model=SessionSummary)
    def session_summary(session_id: str) -> SessionSummary:
        return SessionSummary(**get_run(session_id).summary())

    @app.get("/sessions/{session_id}/events")
    def session_events(session_id: str, request: Request, after: int = 0) -> StreamingResponse:
        run = get_run(session_id)
        last_id = request.headers.get("last-event-id")
        if last_id is not None and last_id.isdigit():
            after = max(after, int(last_id))
        return StreamingResponse(
            _event_stream(run, after),
            media_type="text/event-stream",
            headers={"Cache-Control": "no-store"},
        )

    @app.post("/sessions/{session_id}/followup", response_model=SessionCreated, status_code=201)
    def followup(session_id: str, body: FollowupRequest) -> SessionCreated:
        svc = require_ready()
        parent = get_run(session_id)
        if not body.query.strip():
            raise HTTPException(status_code=422, detail="query must not be empty")
        try:
            run = svc.manager.start(body.query, script=body.script, parent_id=parent.session_id)
        except SessionNotReadyError as exc:
            raise HTTPException(status_code=409, detail=str(exc)) from None
        except UnknownScriptError as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from None
        return SessionCreated(session_id=run.session_id, parent_id=parent.session_id)

    @app.get("/sessions/{session_id}/records")
    def session_records(session_id: str) -> Response:
        run = get_run(session_id)
        if not run.done:
            raise HTTPException(status_code=409, detail="session is still running")
        return Response(content=run.records_text(), media_type="application/x-ndjson")

    # The browser console is plain static files; the API works without it.
    console = state.config.console_dir
    if console is not None and (console / "index.html").is_file():
        app.mount("/console", StaticFiles(directory=console, html=True), name="console")

    return app
