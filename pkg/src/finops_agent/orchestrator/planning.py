"""The planning agent: turn a request into an ordered, tool-bound plan."""

from __future__ import annotations

import re
from dataclasses import dataclass

from finops_agent.errors import FinopsError
from finops_agent.llm.base import ChatMessage, CompletionParams, LlmBackend
from finops_agent.orchestrator.tools import ToolSpec, render_registry
from finops_agent.schema_core.sdl import CANONICAL_ENDPOINTS


class UnparseablePlanError(FinopsError):
    """The model's plan response contains no usable numbered steps."""


@dataclass(frozen=True)
class PlanStep:
    index: int  # 1-based, in plan order
    description: str
    bound_tool: str | None = None
    depends_on: tuple[int, ...] = ()


@dataclass(frozen=True)
class ExecutionPlan:
    steps: tuple[PlanStep, ...]
    raw_text: str = ""

    def tool_steps(self) -> tuple[PlanStep, ...]:
        return tuple(s for s in self.steps if s.bound_tool)

    def tool_sequence(self) -> tuple[str, ...]:
        return tuple(s.bound_tool for s in self.steps if s.bound_tool)


_STEP_RE = re.compile(r"^\s*(\d+)[.):\]]\s+(.*\S)\s*$")
_AFTER_RE = re.compile(r"after steps?\s+((?:\d+)(?:(?:\s*,\s*|\s+and\s+)\d+)*)", re.IGNORECASE)
_TOOL_RES = {name: re.compile(rf"\b{re.escape(name)}\b") for name in CANONICAL_ENDPOINTS}

PLANNING_RULES = """\
You are the planning agent of a FinOps assistant.
Decompose the request into a numbered list of steps, one per line, like:
1. <what to do>
Name the data retrieval tool for a step exactly as listed below.
Only output the numbered list.

Tools:
"""


def bound_tool(description: str) -> str | None:
    """The first canonical tool name the text mentions, by exact-name match."""
    hits = [(m.start(), name) for name, rx in _TOOL_RES.items() if (m := rx.search(description))]
    if not hits:
        return None
    return min(hits)[1]


def parse_plan(text: str) -> ExecutionPlan:
    """Parse a numbered-step response into an ExecutionPlan.

    Steps are renumbered 1..n in order of appearance. A step citing
    "after step N" gains a dependency on N when N is an earlier step;
    forward references are ignored to keep the plan acyclic.
    """
    steps: list[PlanStep] = []
    for line in text.splitlines():
        m = _STEP_RE.match(line)
        if not m:
            continue
        index = len(steps) + 1
        description = m.group(2)
        depends = tuple(
            sorted(
                {
                    n
                    for dep in _AFTER_RE.finditer(description)
                    for n in (int(x) for x in re.findall(r"\d+", dep.group(1)))
                    if 1 <= n < index
                }
            )
        )
        steps.append(PlanStep(index=index, description=description, bound_tool=bound_tool(description), depends_on=depends))
    if not steps:
        raise UnparseablePlanError("no numbered steps found in the plan response")
    if not any(s.bound_tool for s in steps):
        raise UnparseablePlanError("no plan step names a data retrieval tool")
    return ExecutionPlan(steps=tuple(steps), raw_text=text)


def plan(
    user_query: str,
    registry: tuple[ToolSpec, ...],
    backend: LlmBackend,
    params: CompletionParams | None = None,
    context: str = "",
) -> ExecutionPlan:
    """Ask the model for a plan and parse it. Raises UnparseablePlanError."""
    system = PLANNING_RULES + render_registry(registry)
    user = f"Context:\n{context}\n\nRequest: {user_query}" if context else f"Request: {user_query}"
    response = backend.complete([ChatMessage("system", system), ChatMessage("user", user)], params or CompletionParams())
    return parse_plan(response)


def plan_to_payload(p: ExecutionPlan) -> dict:
    return {
        "steps": [
            {
                "index": s.index,
                "description": s.description,
                "bound_tool": s.bound_tool,
                "depends_on": list(s.depends_on),
            }
            for s in p.steps
        ],
        "raw_text": p.raw_text,
    }
