"""The six data retrieval tools and their dispatch into the gateway.

A tool call is realized as a canonical query (one top-level selection,
every field of the return type selected) validated and executed against
the federated gateway. Failures of any kind come back as error
observations for the agent loop to read; invoke_tool never raises.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any, Mapping

from finops_agent.errors import FinopsError
from finops_agent.gateway.execute import ResultDocument, execute_query
from finops_agent.schema_core.digest import introspect
from finops_agent.schema_core.query import Argument, FieldSelection, QueryDocument
from finops_agent.schema_core.sdl import CANONICAL_ENDPOINTS, SCALARS, UnifiedSchema
from finops_agent.schema_core.validate import validate_query
from finops_agent.vendors.store import VendorStore


class RegistryError(FinopsError):
    """The tool registry does not match the six canonical endpoints."""


@dataclass(frozen=True)
class ToolSpec:
    name: str
    signature: str
    description: str


@dataclass(frozen=True)
class ObservationSection:
    """One response key of an executed query: its records or its error."""

    key: str
    endpoint: str
    args: Mapping[str, Any] = field(default_factory=dict)
    records: tuple[Any, ...] = ()
    error: str | None = None


@dataclass(frozen=True)
class Observation:
    """What the agent sees after one action."""

    sections: tuple[ObservationSection, ...]
    text: str
    ok: bool
    route: str = "direct"  # direct | nl_query
    iteration: int = 0

    @property
    def tools_served(self) -> tuple[str, ...]:
        """Canonical endpoints that returned data without error."""
        return tuple(s.endpoint for s in self.sections if s.error is None)


def build_registry(schema: UnifiedSchema) -> tuple[ToolSpec, ...]:
    """One ToolSpec per endpoint, digest-ordered; exactly the six canonical names."""
    digest = introspect(schema)
    specs = tuple(ToolSpec(e.name, e.signature, e.description) for e in digest.entries)
    names = {s.name for s in specs}
    if names != set(CANONICAL_ENDPOINTS) or len(specs) != 6:
        raise RegistryError(f"registry must hold the six canonical tools, got {sorted(names)}")
    return specs


def render_registry(registry: tuple[ToolSpec, ...]) -> str:
    return "\n".join(f"- {s.signature} :: {s.description}" for s in registry)


def error_observation(message: str, route: str = "direct") -> Observation:
    return Observation(sections=(), text=f"ERROR: {message}", ok=False, route=route)


def _canonical_args(sel: FieldSelection, schema: UnifiedSchema) -> dict[str, Any]:
    resolution = schema.resolve_endpoint(sel.name)
    if resolution is None:
        return {a.name: a.value for a in sel.arguments}
    _, endpoint = resolution
    out: dict[str, Any] = {}
    for a in sel.arguments:
        decl = schema.find_arg(endpoint, a.name)
        out[decl.name if decl else a.name] = a.value
    return out


def observation_from_result(
    doc: QueryDocument, result: ResultDocument, schema: UnifiedSchema, route: str
) -> Observation:
    """Fold an executed query into an Observation, one section per response key."""
    error_by_path = {e.path: e.message for e in result.errors}
    sections = []
    for sel in doc.selections:
        key = sel.response_key
        resolution = schema.resolve_endpoint(sel.name)
        endpoint = resolution[0] if resolution else sel.name
        data = result.data.get(key)
        sections.append(
            ObservationSection(
                key=key,
                endpoint=endpoint,
                args=_canonical_args(sel, schema),
                records=tuple(data) if isinstance(data, list) else (),
                error=error_by_path.get(key),
            )
        )
    ok = bool(sections) and not error_by_path
    if error_by_path:
        parts = [f"ERROR at {path}: {msg}" for path, msg in sorted(error_by_path.items())]
        data_part = {k: v for k, v in result.data.items() if v is not None}
        if data_part:
            parts.append(json.dumps(data_part, ensure_ascii=False))
        text = "\n".join(parts)
    else:
        text = json.dumps(result.data, ensure_ascii=False)
    return Observation(sections=tuple(sections), text=text, ok=ok, route=route)


def synthesize_query(tool_name: str, args: Mapping[str, Any], schema: UnifiedSchema) -> QueryDocument:
    """Canonical single-tool query: the given args, all return-type fields selected."""
    endpoint = schema.endpoint(tool_name)
    if endpoint is None:
        raise RegistryError(f"unknown tool {tool_name!r}")
    arguments = tuple(Argument(name, value) for name, value in args.items())
    selections: tuple[FieldSelection, ...] = ()
    if endpoint.return_type.name not in SCALARS:
        type_def = schema.type_def(endpoint.return_type.name)
        selections = tuple(FieldSelection(name=f.name) for f in type_def.fields)
    root = FieldSelection(name=tool_name, arguments=arguments, selections=selections)
    return QueryDocument(operation_name=None, selections=(root,))


def invoke_tool(
    tool_name: str,
    args: Mapping[str, Any],
    schema: UnifiedSchema,
    store: VendorStore,
) -> Observation:
    """Dispatch one tool call; every failure is an error observation, never an exception."""
    if tool_name not in CANONICAL_ENDPOINTS:
        available = ", ".join(sorted(CANONICAL_ENDPOINTS))
        return error_observation(f"unknown tool: {tool_name}; available: {available}")
    for name, value in args.items():
        if not isinstance(value, (str, int, float, bool)):
            return error_observation(f"argument {name!r} must be a scalar, got {type(value).__name__}")
    doc = synthesize_query(tool_name, args, schema)
    report = validate_query(doc, schema)
    if not report.valid:
        issues = "; ".join(f"{i.code}: {i.message}" for i in report.errors)
        return error_observation(f"invalid arguments for {tool_name}: {issues}")
    result = execute_query(doc, schema, store)
    return observation_from_result(doc, result, schema, route="direct")
