"""Session lifecycle behind the HTTP service.

Each session runs the five-stage pipeline on its own thread and appends
every pipeline event to a sequence-numbered log; server-sent-event
streams replay the log from any sequence number and then follow it
live. The service itself appends the terminal `done` event, so a
consumer that has seen `done` has seen everything.
"""

from __future__ import annotations

import itertools
import threading
import time
from dataclasses import dataclass, replace
from typing import Any, Callable, Mapping

from finops_agent.errors import FinopsError
from finops_agent.llm.base import LlmBackend
from finops_agent.nl2graphql.exemplars import Exemplar
from finops_agent.orchestrator.consolidate import ConsolidatedDataset
from finops_agent.orchestrator.recommend import render_line
from finops_agent.orchestrator.session import (
    SessionAbortedError,
    SessionDeps,
    SessionLimits,
    SessionTranscript,
    run_session,
)
from finops_agent.schema_core.sdl import UnifiedSchema
from finops_agent.vendors.store import VendorStore

# Backend factory: called once per session with the requested script
# name (None = the configured default).
BackendFactory = Callable[[str | None], LlmBackend]


class SessionNotFoundError(FinopsError):
    """No session is registered under the given id."""


class SessionNotReadyError(FinopsError):
    """A follow-up was requested before the parent session completed."""


class UnknownScriptError(FinopsError):
    """The requested scripted-backend file does not exist."""


@dataclass(frozen=True)
class SessionEvent:
    seq: int  # 1-based, gapless
    kind: str  # stage_marker | iteration | record | error | done
    payload: Mapping[str, Any]


class SessionRun:
    """One session's mutable server-side state; thread-safe."""

    def __init__(self, session_id: str, user_query: str, parent_id: str | None = None):
        self.session_id = session_id
        self.user_query = user_query
        self.parent_id = parent_id
        self.children: list[str] = []
        self.transcript: SessionTranscript | None = None
        self.error: str | None = None
        self.done = False
        self._events: list[SessionEvent] = []
        self._cond = threading.Condition()

    def append(self, kind: str, payload: dict) -> None:
        with self._cond:
            self._events.append(SessionEvent(seq=len(self._events) + 1, kind=kind, payload=payload))
            self._cond.notify_all()

    def finish(self, transcript: SessionTranscript | None, error: str | None) -> None:
        """Record the outcome and append the terminal done event."""
        with self._cond:
            self.transcript = transcript
            self.error = error
        if error is not None:
            self.append("error", {"message": error})
        self.append(
            "done",
            {
                "halt_reason": transcript.halt_reason if transcript else "aborted",
                "completed": bool(transcript and transcript.completed),
                "record_count": len(transcript.recommendations) if transcript else 0,
                "error": error,
            },
        )
        with self._cond:
            self.done = True
            self._cond.notify_all()

    def event_count(self) -> int:
        with self._cond:
            return len(self._events)

    def events_after(self, after: int) -> tuple[list[SessionEvent], bool]:
        with self._cond:
            return list(self._events[after:]), self.done

    def wait_events(self, after: int, timeout: float) -> tuple[list[SessionEvent], bool]:
        """Events newer than seq `after`, blocking up to timeout for fresh ones."""
        with self._cond:
            self._cond.wait_for(lambda: len(self._events) > after or self.done, timeout=timeout)
            return list(self._events[after:]), self.done

    def records_text(self) -> str:
        """The records export, exactly as the record emitter writes it."""
        if self.transcript is None:
            return ""
        return "".join(render_line(r) + "\n" for r in self.transcript.recommendations)

    def summary(self) -> dict[str, Any]:
        with self._cond:
            t = self.transcript
            return {
                "session_id": self.session_id,
                "user_query": self.user_query,
                "parent_id": self.parent_id,
                "children": list(self.children),
                "done": self.done,
                "completed": bool(t and t.completed),
                "halt_reason": t.halt_reason if t else "",
                "stage_markers": list(t.stage_markers) if t else [],
                "record_count": len(t.recommendations) if t else 0,
                "error": self.error,
            }


class SessionManager:
    """Starts sessions on worker threads and tracks them by id."""

    def __init__(
        self,
        schema: UnifiedSchema,
        store: VendorStore,
        backend_factory: BackendFactory,
        bank: list[Exemplar] | None = None,
        limits: SessionLimits | None = None,
        clock: Callable[[], float] = time.time,
    ):
        self._schema = schema
        self._store = store
        self._backend_factory = backend_factory
        self._bank = bank
        self._limits = limits or SessionLimits()
        self._clock = clock
        self._runs: dict[str, SessionRun] = {}
        self._lock = threading.Lock()
        self._ids = itertools.count(1)

    def get(self, session_id: str) -> SessionRun:
        with self._lock:
            run = self._runs.get(session_id)
        if run is None:
            raise SessionNotFoundError(f"no session {session_id!r}")
        return run

    def start(
        self,
        query: str,
        script: str | None = None,
        max_iterations: int | None = None,
        parent_id: str | None = None,
    ) -> SessionRun:
        """Launch a session thread; raises before the thread starts on bad input."""
        context: ConsolidatedDataset | None = None
        if parent_id is not None:
            parent = self.get(parent_id)
            if not (parent.done and parent.transcript and parent.transcript.completed):
                raise SessionNotReadyError(f"session {parent_id!r} has not completed")
            context = parent.transcript.consolidated
        backend = self._backend_factory(script)
        limits = self._limits
        if max_iterations is not None:
            limits = replace(limits, max_iterations=max_iterations)

        with self._lock:
            session_id = f"s{next(self._ids):04d}"
            run = SessionRun(session_id, query, parent_id=parent_id)
            self._runs[session_id] = run
            if parent_id is not None:
                self._runs[parent_id].children.append(session_id)

        deps = SessionDeps(
            schema=self._schema,
            store=self._store,
            backend=backend,
            bank=self._bank,
            clock=self._clock,
            on_event=run.append,
        )
        thread = threading.Thread(
            target=self._work,
            args=(run, query, deps, limits, context),
            name=f"session-{session_id}",
            daemon=True,
        )
        thread.start()
        return run

    @staticmethod
    def _work(
        run: SessionRun,
        query: str,
        deps: SessionDeps,
        limits: SessionLimits,
        context: ConsolidatedDataset | None,
    ) -> None:
        try:
            transcript = run_session(
                query, deps, limits, session_id=run.session_id, context_dataset=context
            )
            run.finish(transcript, None)
        except SessionAbortedError as exc:
            run.finish(exc.transcript, str(exc))
        except Exception as exc:
            # A scripted backend mismatch or similar configuration fault;
            # the stream must still terminate with a done event.
            run.finish(None, f"{type(exc).__name__}: {exc}")
