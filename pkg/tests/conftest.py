"""Shared fixtures: the packaged schema, fixtures, bank, and scripted runs."""

from __future__ import annotations

import json

import pytest

from finops_agent.assets import (
    DEFAULT_ALIASES,
    DEFAULT_BANK,
    DEFAULT_FIXTURES,
    DEFAULT_GROUNDTRUTH,
    DEFAULT_SCHEMA,
    script_path,
)
from finops_agent.evalharness.benchmark import USE_CASE_QUERY
from finops_agent.evalharness.groundtruth import load_groundtruth
from finops_agent.llm.scripted import ScriptedBackend
from finops_agent.nl2graphql.exemplars import load_bank
from finops_agent.orchestrator.session import SessionDeps, SessionLimits, run_session
from finops_agent.schema_core.sdl import load_unified
from finops_agent.vendors.store import load_fixtures


class StepClock:
    """Deterministic clock: every call advances by a fixed step."""

    def __init__(self, start: float = 0.0, step: float = 1.0):
        self.now = start
        self.step = step
        self.calls = 0

    def __call__(self) -> float:
        value = self.now
        self.now += self.step
        self.calls += 1
        return value


@pytest.fixture(scope="session")
def sdl_text() -> str:
    return DEFAULT_SCHEMA.read_text(encoding="utf-8")


@pytest.fixture(scope="session")
def schema():
    return load_unified(DEFAULT_SCHEMA, DEFAULT_ALIASES)


@pytest.fixture(scope="session")
def bare_schema():
    return load_unified(DEFAULT_SCHEMA, None)


@pytest.fixture(scope="session")
def store():
    return load_fixtures(DEFAULT_FIXTURES)


@pytest.fixture(scope="session")
def bank(schema):
    return load_bank(DEFAULT_BANK, schema)


@pytest.fixture(scope="session")
def gt():
    return load_groundtruth(DEFAULT_GROUNDTRUTH)


@pytest.fixture(scope="session")
def raw_fixtures() -> dict:
    turbo = json.loads((DEFAULT_FIXTURES / "turbonomic.json").read_text(encoding="utf-8"))
    apptio = json.loads((DEFAULT_FIXTURES / "apptio.json").read_text(encoding="utf-8"))
    return {"turbonomic": turbo, "apptio": apptio}


def make_backend(name: str) -> ScriptedBackend:
    return ScriptedBackend.from_file(script_path(name))


@pytest.fixture()
def scripted_backend():
    return make_backend


def run_scripted(
    script_name: str,
    schema,
    store,
    bank,
    query: str = USE_CASE_QUERY,
    clock=None,
    limits: SessionLimits | None = None,
    context_dataset=None,
    session_id: str = "session",
    on_event=None,
):
    """One session against a packaged script, with a deterministic clock."""
    deps = SessionDeps(
        schema=schema,
        store=store,
        backend=make_backend(script_name),
        bank=bank,
        clock=clock or StepClock(),
        on_event=on_event,
    )
    return run_session(
        query,
        deps,
        limits=limits,
        session_id=session_id,
        context_dataset=context_dataset,
    )
