"""Field mappings between vendor adapter records and unified schema types.

Each endpoint declares how its adapter's record attributes map onto the
fields of the unified return type. Transforms: identity (same name, pass
through), rename (attribute name differs from the unified field), and
coerce_number (value is widened to float when present).
"""

from __future__ import annotations

from dataclasses import dataclass, fields as dataclass_fields
from typing import Any, Mapping

from finops_agent.schema_core.sdl import SCALARS, UnifiedSchema


@dataclass(frozen=True)
class FieldMapping:
    vendor_field: str
    unified_field: str
    transform: str = "identity"  # identity | rename | coerce_number

    def apply(self, record: Any) -> Any:
        value = getattr(record, self.vendor_field)
        if self.transform == "coerce_number" and value is not None:
            return float(value)
        return value


def _mapping(*pairs: tuple[str, str] | tuple[str, str, str]) -> tuple[FieldMapping, ...]:
    out = []
    for pair in pairs:
        vendor, unified = pair[0], pair[1]
        transform = pair[2] if len(pair) == 3 else ("identity" if vendor == unified else "rename")
        out.append(FieldMapping(vendor, unified, transform))
    return tuple(out)


ENDPOINT_MAPPINGS: Mapping[str, tuple[FieldMapping, ...]] = {
    "get_entities": _mapping(
        ("id", "id"),
        ("name", "name"),
        ("description", "description"),
        ("cost", "cost", "coerce_number"),
        ("user_id", "user_id"),
    ),
    "get_actions": _mapping(
        ("id", "id"),
        ("name", "name"),
        ("action_type", "actionType"),
        ("category", "category"),
        ("severity", "severity"),
        ("risk", "risk"),
        ("target", "target"),
        ("cost_impact", "costImpact", "coerce_number"),
        ("business_criticality", "businessCriticality"),
    ),
    "get_spending_anomaly_events": _mapping(
        ("id", "id"),
        ("application", "application"),
        ("anomaly_type", "anomalyType"),
        ("anomaly_value", "anomalyValue", "coerce_number"),
        ("timestamp", "timestamp"),
    ),
    "get_commitment_recommendations": _mapping(
        ("id", "id"),
        ("service", "service"),
        ("current_coverage", "currentCoverage", "coerce_number"),
        ("recommended_commitment", "recommendedCommitment", "coerce_number"),
        ("potential_savings", "potentialSavings", "coerce_number"),
    ),
    "get_rightsizing_recommendations": _mapping(
        ("id", "id"),
        ("resource", "resource"),
        ("current_utilization", "currentUtilization", "coerce_number"),
        ("recommended_size", "recommendedSize"),
        ("estimated_savings", "estimatedSavings", "coerce_number"),
    ),
}


def to_unified(endpoint: str, record: Any) -> dict[str, Any]:
    """Render one adapter record as a unified-schema dict."""
    return {m.unified_field: m.apply(record) for m in ENDPOINT_MAPPINGS[endpoint]}


def check_mappings(schema: UnifiedSchema, record_types: Mapping[str, type] | None = None) -> None:
    """Verify every mapping is total over its unified return type and
    names real adapter attributes. Raises ValueError on any gap."""
    for ep in schema.endpoints:
        if ep.return_type.name in SCALARS:
            continue
        mappings = ENDPOINT_MAPPINGS.get(ep.name)
        if mappings is None:
            raise ValueError(f"no field mapping for endpoint {ep.name!r}")
        type_def = schema.type_def(ep.return_type.name)
        unified = {f.name for f in type_def.fields}
        mapped = {m.unified_field for m in mappings}
        if mapped != unified:
            raise ValueError(f"mapping for {ep.name!r} not total: missing={unified - mapped} extra={mapped - unified}")
        if record_types and ep.name in record_types:
            attrs = {f.name for f in dataclass_fields(record_types[ep.name])}
            for m in mappings:
                if m.vendor_field not in attrs:
                    raise ValueError(f"mapping for {ep.name!r} names unknown attribute {m.vendor_field!r}")
