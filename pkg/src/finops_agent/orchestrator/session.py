"""One end-to-end agent session.

Five stages run in a fixed order: instruction review (context assembly,
no model call), planning, the ReAct retrieval loop, consolidation, and
recommendation. The loop speaks a line-anchored text protocol:

    Thought: <free text>
    Action: <tool name, nl_query, or finish>
    Action Input: <single-line JSON object>

nl_query routes its request through natural-language translation into a
federated query; naming a tool directly dispatches it as-is. Every
failure the model can recover from comes back as an observation. Only a
backend outage aborts, carrying the partial transcript.
"""

from __future__ import annotations

import json
import re
import time
from collections import Counter
from dataclasses import dataclass, field, replace
from datetime import datetime, timezone
from typing import Any, Callable, Mapping

from finops_agent.errors import FinopsError
from finops_agent.gateway.execute import execute_query
from finops_agent.llm.base import ChatMessage, CompletionParams, LlmBackend, LlmUnavailableError
from finops_agent.nl2graphql.exemplars import Exemplar
from finops_agent.nl2graphql.translate import TranslationError, translate
from finops_agent.orchestrator.consolidate import ConsolidatedDataset, consolidate
from finops_agent.orchestrator.planning import (
    PLANNING_RULES,
    ExecutionPlan,
    UnparseablePlanError,
    parse_plan,
    plan_to_payload,
)
from finops_agent.orchestrator.recommend import (
    NoRecommendationsError,
    RecommendationRecord,
    record_to_dict,
    recommend,
)
from finops_agent.orchestrator.tools import (
    Observation,
    build_registry,
    error_observation,
    invoke_tool,
    observation_from_result,
    render_registry,
)
from finops_agent.schema_core.sdl import CANONICAL_ENDPOINTS, UnifiedSchema
from finops_agent.vendors.store import VendorStore

STAGES = ("instruction_review", "plan", "retrieval", "consolidation", "recommendation")

EventCallback = Callable[[str, dict], None]

_ACTION_RE = re.compile(r"^\s*Action:\s*(.+?)\s*$", re.MULTILINE)
_INPUT_RE = re.compile(r"^\s*Action Input:\s*(.+?)\s*$", re.MULTILINE)
_TOOL_RES = {name: re.compile(rf"\b{re.escape(name)}\b") for name in CANONICAL_ENDPOINTS}


class SessionAbortedError(FinopsError):
    """The backend became unavailable; the partial transcript is attached."""

    def __init__(self, message: str, transcript: "SessionTranscript"):
        super().__init__(message)
        self.transcript = transcript


@dataclass(frozen=True)
class SessionLimits:
    max_iterations: int = 25
    max_translation_attempts: int = 3
    exemplar_count: int = 3
    budget_delta_max: float = 0.0

    def __post_init__(self) -> None:
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")


@dataclass
class SessionDeps:
    schema: UnifiedSchema
    store: VendorStore
    backend: LlmBackend
    params: CompletionParams = field(default_factory=CompletionParams)
    bank: list[Exemplar] | None = None
    clock: Callable[[], float] = time.time
    on_event: EventCallback | None = None


@dataclass(frozen=True)
class ReactIteration:
    index: int  # 1-based
    thought: str
    action_kind: str  # tool | finish | none
    action_name: str | None
    action_args: Mapping[str, Any] | None
    observation: Observation | None  # None only when the action is finish
    raw_response: str

    @property
    def tools_referenced(self) -> frozenset[str]:
        """Canonical tool names mentioned in the thought or the action."""
        text = self.thought + " " + (self.action_name or "")
        return frozenset(name for name, rx in _TOOL_RES.items() if rx.search(text))


@dataclass(frozen=True)
class SessionTranscript:
    session_id: str
    user_query: str
    model_id: str
    started_at: str  # ISO-8601 UTC
    stage_markers: tuple[str, ...]
    plan: ExecutionPlan | None
    iterations: tuple[ReactIteration, ...]
    consolidated: ConsolidatedDataset | None
    recommendations: tuple[RecommendationRecord, ...]
    dropped_records: int
    wall_time_seconds: float
    halt_reason: str  # finish | plan_complete | iteration_cap | aborted | ""
    iteration_cap_exceeded: bool
    used_parent_context: bool
    notes: tuple[str, ...]

    @property
    def completed(self) -> bool:
        return tuple(self.stage_markers) == STAGES and not self.iteration_cap_exceeded

    def observations(self) -> tuple[Observation, ...]:
        return tuple(i.observation for i in self.iterations if i.observation is not None)


@dataclass(frozen=True)
class _ParsedResponse:
    thought: str
    kind: str  # tool | finish | none
    name: str | None
    args: Mapping[str, Any] | None
    args_error: str | None


def parse_react_response(text: str) -> _ParsedResponse:
    """Split a model turn into thought, action, and JSON input."""
    m = _ACTION_RE.search(text)
    if m is None:
        thought = re.sub(r"^\s*Thought:\s*", "", text.strip())
        return _ParsedResponse(thought=thought, kind="none", name=None, args=None, args_error=None)
    thought = re.sub(r"^\s*Thought:\s*", "", text[: m.start()].strip())
    name = m.group(1).strip()
    if name.lower() == "finish":
        return _ParsedResponse(thought=thought, kind="finish", name="finish", args=None, args_error=None)
    args: Mapping[str, Any] = {}
    args_error = None
    im = _INPUT_RE.search(text, m.end())
    if im is not None:
        try:
            parsed = json.loads(im.group(1))
            if isinstance(parsed, Mapping):
                args = parsed
            else:
                args_error = "Action Input must be a JSON object"
        except json.JSONDecodeError as exc:
            args_error = f"Action Input is not valid JSON: {exc}"
    return _ParsedResponse(thought=thought, kind="tool", name=name, args=args, args_error=args_error)


_RETRIEVAL_RULES = """\
You are the data retrieval agent of a FinOps assistant. Gather the data
the plan calls for using the tools below, one action per turn.

Tools:
{registry}

Respond every turn in exactly this form:
Thought: <your reasoning>
Action: <one tool name, nl_query, or finish>
Action Input: <a single-line JSON object with the arguments>

Action "nl_query" translates a natural language request into one
federated query and runs it; its input is {{"request": "<text>"}}.
Action "finish" ends retrieval once the plan is covered.
"""


def _nl_query(request: str, deps: SessionDeps, limits: SessionLimits) -> Observation:
    try:
        result = translate(
            request,
            deps.schema,
            deps.backend,
            bank=deps.bank,
            max_attempts=limits.max_translation_attempts,
            exemplar_count=limits.exemplar_count,
            params=deps.params,
        )
    except TranslationError as exc:
        return error_observation(str(exc), route="nl_query")
    executed = execute_query(result.final_query, deps.schema, deps.store)
    return observation_from_result(result.final_query, executed, deps.schema, route="nl_query")


def run_session(
    user_query: str,
    deps: SessionDeps,
    limits: SessionLimits | None = None,
    session_id: str = "session",
    context_dataset: ConsolidatedDataset | None = None,
) -> SessionTranscript:
    """Run the five-stage pipeline; returns the full transcript.

    Raises SessionAbortedError (partial transcript attached) when the
    backend reports itself unavailable.
    """
    limits = limits or SessionLimits()
    clock = deps.clock
    t0 = clock()
    started_at = datetime.fromtimestamp(t0, tz=timezone.utc).isoformat()
    model_id = getattr(deps.backend, "model_id", "") or "unknown"

    markers: list[str] = []
    notes: list[str] = []
    iterations: list[ReactIteration] = []
    exec_plan: ExecutionPlan | None = None
    dataset: ConsolidatedDataset | None = None
    records: tuple[RecommendationRecord, ...] = ()
    dropped = 0
    halt = ""
    capped = False

    def emit(kind: str, payload: dict) -> None:
        if deps.on_event is not None:
            deps.on_event(kind, payload)

    def stage(name: str, **detail: Any) -> None:
        markers.append(name)
        emit("stage_marker", {"stage": name, **detail})

    def snapshot() -> SessionTranscript:
        return SessionTranscript(
            session_id=session_id,
            user_query=user_query,
            model_id=model_id,
            started_at=started_at,
            stage_markers=tuple(markers),
            plan=exec_plan,
            iterations=tuple(iterations),
            consolidated=dataset,
            recommendations=records,
            dropped_records=dropped,
            wall_time_seconds=max(0.0, clock() - t0),
            halt_reason="aborted",
            iteration_cap_exceeded=capped,
            used_parent_context=context_dataset is not None,
            notes=tuple(notes),
        )

    # Stage 1: instruction review. Deterministic context assembly: the tool
    # registry and any parent-session dataset are folded into the prompts
    # used by every later stage. No model call happens here.
    registry = build_registry(deps.schema)
    registry_text = render_registry(registry)
    context_text = ""
    if context_dataset is not None:
        context_text = "Consolidated data from the previous session:\n" + context_dataset.to_json()
    stage("instruction_review", tools=[s.name for s in registry])

    # Stage 2: plan.
    stage("plan")
    plan_system = PLANNING_RULES + registry_text
    plan_user = f"Context:\n{context_text}\n\nRequest: {user_query}" if context_text else f"Request: {user_query}"
    try:
        plan_response = deps.backend.complete(
            [ChatMessage("system", plan_system), ChatMessage("user", plan_user)], deps.params
        )
    except LlmUnavailableError as exc:
        emit("error", {"message": str(exc)})
        raise SessionAbortedError(f"backend unavailable during planning: {exc}", snapshot()) from exc
    try:
        exec_plan = parse_plan(plan_response)
    except UnparseablePlanError as exc:
        notes.append(f"plan unparseable: {exc}")
        exec_plan = None

    # Stage 3: the ReAct retrieval loop.
    stage("retrieval", plan=plan_to_payload(exec_plan) if exec_plan else None)
    needed = Counter(exec_plan.tool_sequence()) if exec_plan else Counter()
    succeeded: Counter = Counter()
    system = ChatMessage("system", _RETRIEVAL_RULES.format(registry=registry_text))
    first_user = f"Request: {user_query}\n"
    if context_text:
        first_user += "\n" + context_text + "\n"
    if exec_plan is not None:
        first_user += "\nPlan:\n" + exec_plan.raw_text.strip() + "\n"
    first_user += "\nBegin."
    messages: list[ChatMessage] = [system, ChatMessage("user", first_user)]

    for index in range(1, limits.max_iterations + 1):
        try:
            response = deps.backend.complete(messages, deps.params)
        except LlmUnavailableError as exc:
            emit("error", {"message": str(exc)})
            raise SessionAbortedError(f"backend unavailable at iteration {index}: {exc}", snapshot()) from exc
        parsed = parse_react_response(response)

        if parsed.kind == "finish":
            iterations.append(
                ReactIteration(index, parsed.thought, "finish", "finish", None, None, response)
            )
            emit("iteration", _iteration_payload(iterations[-1]))
            halt = "finish"
            break

        if parsed.kind == "none":
            obs = error_observation(
                "no action found; respond with 'Action: <tool>' and 'Action Input: <JSON>', or 'Action: finish'"
            )
        elif parsed.args_error is not None:
            obs = error_observation(parsed.args_error)
        elif parsed.name == "nl_query":
            request = parsed.args.get("request")
            if not isinstance(request, str) or not request.strip():
                obs = error_observation('nl_query needs {"request": "<text>"}', route="nl_query")
            else:
                obs = _nl_query(request, deps, limits)
        else:
            obs = invoke_tool(parsed.name, parsed.args, deps.schema, deps.store)
        obs = replace(obs, iteration=index)

        iterations.append(
            ReactIteration(
                index=index,
                thought=parsed.thought,
                action_kind=parsed.kind,
                action_name=parsed.name,
                action_args=dict(parsed.args) if parsed.args is not None else None,
                observation=obs,
                raw_response=response,
            )
        )
        emit("iteration", _iteration_payload(iterations[-1]))
        messages.append(ChatMessage("assistant", response))
        messages.append(ChatMessage("user", "Observation: " + obs.text))

        succeeded.update(obs.tools_served)
        if needed and all(succeeded[tool] >= count for tool, count in needed.items()):
            halt = "plan_complete"
            break
    else:
        halt = "iteration_cap"
        capped = True
        notes.append(f"iteration cap of {limits.max_iterations} reached before the plan was covered")

    # Stage 4: consolidation.
    stage("consolidation")
    dataset = consolidate([i.observation for i in iterations if i.observation is not None])

    # Stage 5: analysis and recommendation.
    stage("recommendation", dataset=dataset.to_payload())
    try:
        result = recommend(
            dataset, {"budget_delta_max": limits.budget_delta_max}, deps.backend, deps.params
        )
        records = result.records
        dropped = result.dropped
    except NoRecommendationsError as exc:
        notes.append(f"no recommendations: {exc}")
    except LlmUnavailableError as exc:
        emit("error", {"message": str(exc)})
        raise SessionAbortedError(f"backend unavailable during analysis: {exc}", snapshot()) from exc
    for rec in records:
        emit("record", record_to_dict(rec))

    return SessionTranscript(
        session_id=session_id,
        user_query=user_query,
        model_id=model_id,
        started_at=started_at,
        stage_markers=tuple(markers),
        plan=exec_plan,
        iterations=tuple(iterations),
        consolidated=dataset,
        recommendations=records,
        dropped_records=dropped,
        wall_time_seconds=max(0.0, clock() - t0),
        halt_reason=halt,
        iteration_cap_exceeded=capped,
        used_parent_context=context_dataset is not None,
        notes=tuple(notes),
    )


def _iteration_payload(it: ReactIteration) -> dict[str, Any]:
    return {
        "index": it.index,
        "thought": it.thought,
        "action_kind": it.action_kind,
        "action_name": it.action_name,
        "action_args": dict(it.action_args) if it.action_args is not None else None,
        "observation": None
        if it.observation is None
        else {
            "ok": it.observation.ok,
            "route": it.observation.route,
            "text": it.observation.text,
        },
        "tools_referenced": sorted(it.tools_referenced),
    }
