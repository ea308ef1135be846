"""Federated query execution against the vendor adapters.

Each top-level selection is dispatched to the adapter behind its
canonical endpoint, mapped to unified field names, deduplicated, and
projected down to exactly the requested fields. Selections resolve
independently: a failing selection contributes a per-path error and a
null data entry without disturbing its siblings.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Callable

from finops_agent.gateway.mapping import to_unified
from finops_agent.gateway.merge import merge_and_dedupe
from finops_agent.schema_core.query import FieldSelection, QueryDocument
from finops_agent.schema_core.sdl import SCALARS, EndpointDef, UnifiedSchema
from finops_agent.vendors import store as vendors
from finops_agent.vendors.store import VendorStore


@dataclass(frozen=True)
class PathError:
    path: str
    message: str


@dataclass(frozen=True)
class Provenance:
    vendor: str
    operation: str


@dataclass(frozen=True)
class ResultDocument:
    data: dict[str, Any] = field(default_factory=dict)
    errors: tuple[PathError, ...] = ()
    provenance: dict[str, Provenance] = field(default_factory=dict)


# Adapter registry: canonical endpoint -> (operation name, callable taking
# (store, **args) with canonical snake_case argument names).
_ADAPTERS: dict[str, tuple[str, Callable[..., Any]]] = {
    "get_applications_names": ("turbo_list_applications", vendors.turbo_list_applications),
    "get_entities": ("turbo_list_entities", vendors.turbo_list_entities),
    "get_actions": ("turbo_list_actions", vendors.turbo_list_actions),
    "get_spending_anomaly_events": ("apptio_list_anomalies", vendors.apptio_list_anomalies),
    "get_commitment_recommendations": ("apptio_list_commitments", vendors.apptio_list_commitments),
    "get_rightsizing_recommendations": ("apptio_list_rightsizings", vendors.apptio_list_rightsizings),
}

# Schema argument name -> adapter keyword, where they differ.
_ARG_KEYWORDS = {
    "get_entities": {"application_name": "application_name"},
    "get_actions": {"entity_name": "entity_name", "app_name": "app_name"},
    "get_spending_anomaly_events": {"app_name": "app_name"},
    "get_rightsizing_recommendations": {"app_name": "app_name"},
}


def execute_query(doc: QueryDocument, schema: UnifiedSchema, store: VendorStore) -> ResultDocument:
    """Execute a validated query document; data-level failures never raise."""
    data: dict[str, Any] = {}
    errors: list[PathError] = []
    provenance: dict[str, Provenance] = {}

    for sel in doc.selections:
        key = sel.response_key
        resolution = schema.resolve_endpoint(sel.name)
        if resolution is None:
            data[key] = None
            errors.append(PathError(key, f"unknown endpoint {sel.name!r}"))
            continue
        canonical, endpoint = resolution
        op_name, adapter = _ADAPTERS[canonical]
        try:
            kwargs = _marshal_args(sel, endpoint, schema, canonical)
            records = adapter(store, **kwargs)
            data[key] = _serialize(canonical, endpoint, sel, records)
        except Exception as exc:  # data-level issues become per-path errors
            data[key] = None
            errors.append(PathError(key, f"{type(exc).__name__}: {exc}"))
        provenance[key] = Provenance(vendor=endpoint.source_vendor, operation=op_name)

    return ResultDocument(data=data, errors=tuple(errors), provenance=provenance)


def _marshal_args(
    sel: FieldSelection, endpoint: EndpointDef, schema: UnifiedSchema, canonical: str
) -> dict[str, Any]:
    keywords = _ARG_KEYWORDS.get(canonical, {})
    kwargs: dict[str, Any] = {}
    for arg in sel.arguments:
        decl = schema.find_arg(endpoint, arg.name)
        if decl is None:
            raise ValueError(f"unknown argument {arg.name!r}")
        value: Any = arg.value
        if decl.type.name == "Float" and isinstance(value, int) and not isinstance(value, bool):
            value = float(value)
        kwargs[keywords.get(decl.name, decl.name)] = value
    return kwargs


def _serialize(canonical: str, endpoint: EndpointDef, sel: FieldSelection, records: Any) -> Any:
    if endpoint.return_type.name in SCALARS:
        return list(records) if endpoint.return_type.is_list else records
    unified = [to_unified(canonical, r) for r in records]
    unified = merge_and_dedupe(unified)
    return [{child.response_key: rec[child.name] for child in sel.selections} for rec in unified]
