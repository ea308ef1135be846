"""The benchmark runner: N independent sessions per backend, scored and tabled.

Every run gets a backend of its own from the backend factory, so runs
never share mutable state and may execute concurrently. A backend whose
runs hit three consecutive outages has its column marked incomplete and
its remaining runs skipped.
"""

from __future__ import annotations

import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

from finops_agent.errors import FinopsError
from finops_agent.evalharness.groundtruth import GroundTruth
from finops_agent.evalharness.metrics import aggregate
from finops_agent.evalharness.report import MetricsTable, row_from_raw
from finops_agent.llm.base import CompletionParams, LlmBackend
from finops_agent.nl2graphql.exemplars import Exemplar
from finops_agent.orchestrator.session import (
    SessionAbortedError,
    SessionDeps,
    SessionLimits,
    SessionTranscript,
    run_session,
)
from finops_agent.orchestrator.transcript import persist_transcript
from finops_agent.schema_core.sdl import UnifiedSchema
from finops_agent.vendors.store import VendorStore

USE_CASE_QUERY = (
    "Help me review pending resource and cost optimization recommendations for our IT "
    "infrastructure to accommodate a new product launch without increasing the budget."
)

MAX_CONSECUTIVE_FAILURES = 3


class BenchmarkConfigError(FinopsError):
    """The benchmark configuration is unusable."""


@dataclass(frozen=True)
class BackendSpec:
    name: str
    factory: Callable[[], LlmBackend]


@dataclass(frozen=True)
class BenchmarkConfig:
    backends: tuple[BackendSpec, ...]
    schema: UnifiedSchema
    store: VendorStore
    groundtruth: GroundTruth
    n_runs: int = 10
    parallelism: int = 1
    user_query: str = USE_CASE_QUERY
    limits: SessionLimits = field(default_factory=SessionLimits)
    params: CompletionParams = field(default_factory=CompletionParams)
    bank: list[Exemplar] | None = None
    out_dir: Path | None = None
    clock: Callable[[], float] = time.time

    def __post_init__(self) -> None:
        if self.n_runs < 1:
            raise BenchmarkConfigError(f"n_runs must be >= 1, got {self.n_runs}")
        if self.parallelism < 1:
            raise BenchmarkConfigError(f"parallelism must be >= 1, got {self.parallelism}")
        if not self.backends:
            raise BenchmarkConfigError("at least one backend is required")


@dataclass(frozen=True)
class BenchmarkOutcome:
    table: MetricsTable
    incomplete_backends: tuple[str, ...]

    @property
    def all_complete(self) -> bool:
        return not self.incomplete_backends


def _one_run(config: BenchmarkConfig, spec: BackendSpec, run_index: int) -> SessionTranscript | None:
    """Run one session; None means the backend was unavailable."""
    deps = SessionDeps(
        schema=config.schema,
        store=config.store,
        backend=spec.factory(),
        params=config.params,
        bank=config.bank,
        clock=config.clock,
    )
    try:
        transcript = run_session(
            config.user_query,
            deps,
            limits=config.limits,
            session_id=f"{spec.name}-r{run_index:02d}",
        )
    except SessionAbortedError as exc:
        transcript = exc.transcript
        if config.out_dir is not None:
            persist_transcript(transcript, config.out_dir / "runs", run_tag=transcript.session_id)
        return None
    if config.out_dir is not None:
        persist_transcript(transcript, config.out_dir / "runs", run_tag=transcript.session_id)
    return transcript


def _run_backend(config: BenchmarkConfig, spec: BackendSpec) -> tuple[list[SessionTranscript | None], bool]:
    """All runs for one backend, in run order. Returns (attempted runs, incomplete)."""
    attempted: list[SessionTranscript | None] = []
    failures = 0
    if config.parallelism == 1:
        for i in range(config.n_runs):
            result = _one_run(config, spec, i)
            attempted.append(result)
            failures = failures + 1 if result is None else 0
            if failures >= MAX_CONSECUTIVE_FAILURES:
                return attempted, True
        return attempted, False

    with ThreadPoolExecutor(max_workers=config.parallelism) as pool:
        futures = [pool.submit(_one_run, config, spec, i) for i in range(config.n_runs)]
        for future in futures:
            result = future.result()
            attempted.append(result)
            failures = failures + 1 if result is None else 0
            if failures >= MAX_CONSECUTIVE_FAILURES:
                for later in futures[len(attempted):]:
                    later.cancel()
                return attempted, True
    return attempted, False


def run_benchmark(config: BenchmarkConfig, log: Callable[[str], None] | None = None) -> BenchmarkOutcome:
    """Score every configured backend; persist transcripts when out_dir is set."""
    say = log or (lambda msg: print(msg, file=sys.stderr))
    rows = []
    incomplete: list[str] = []
    for spec in config.backends:
        say(f"benchmark: {spec.name}: {config.n_runs} runs")
        attempted, aborted = _run_backend(config, spec)
        if aborted:
            say(f"benchmark: {spec.name}: aborted after {MAX_CONSECUTIVE_FAILURES} consecutive backend outages")
            incomplete.append(spec.name)
        raw = aggregate(attempted, config.groundtruth)
        rows.append(row_from_raw(spec.name, raw, incomplete=aborted))
    return BenchmarkOutcome(table=MetricsTable(rows=tuple(rows)), incomplete_backends=tuple(incomplete))
