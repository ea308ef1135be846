"""Compact prompt-ready rendering of the schema.

The digest is the single source of endpoint metadata handed to language
models: one deterministic entry per endpoint with the call signature,
the return fields, and a one-line description of what the tool does.
"""

from __future__ import annotations

from dataclasses import dataclass
from types import MappingProxyType
from typing import Mapping

from finops_agent.schema_core.sdl import SCALARS, UnifiedSchema

MAX_DIGEST_BYTES = 4096

TOOL_DESCRIPTIONS: Mapping[str, str] = MappingProxyType(
    {
        "get_applications_names": "List the names of all monitored business applications.",
        "get_entities": "List infrastructure entities (VMs, containers, storage) that belong to an application.",
        "get_actions": "List pending optimization actions (resize, placement, delete) for an entity or an application.",
        "get_spending_anomaly_events": "List unusual cost anomalies and spending spikes, optionally for one application.",
        "get_commitment_recommendations": "Review reserved instance and savings plan coverage with suggested new commitments.",
        "get_rightsizing_recommendations": "List rightsizing suggestions with estimated monthly savings, optionally per application.",
    }
)


@dataclass(frozen=True)
class DigestEntry:
    name: str
    signature: str
    return_fields: tuple[str, ...]
    description: str

    def render(self) -> str:
        ret = ", ".join(self.return_fields) if self.return_fields else "String"
        return f"{self.signature} -> [{ret}] :: {self.description}"


@dataclass(frozen=True)
class SchemaDigest:
    entries: tuple[DigestEntry, ...]

    def render(self) -> str:
        return "\n".join(e.render() for e in self.entries)

    def entry(self, name: str) -> DigestEntry | None:
        for e in self.entries:
            if e.name == name:
                return e
        return None


def introspect(schema: UnifiedSchema) -> SchemaDigest:
    """Build the digest: one entry per endpoint, sorted by name, bounded in size."""
    entries = []
    for ep in sorted(schema.endpoints, key=lambda e: e.name):
        if ep.return_type.name in SCALARS:
            fields: tuple[str, ...] = (ep.return_type.name,)
        else:
            type_def = schema.type_def(ep.return_type.name)
            fields = tuple(f.name for f in type_def.fields) if type_def else ()
        entries.append(
            DigestEntry(
                name=ep.name,
                signature=ep.signature(),
                return_fields=fields,
                description=TOOL_DESCRIPTIONS.get(ep.name, ""),
            )
        )
    digest = SchemaDigest(tuple(entries))
    rendered = digest.render()
    if len(rendered.encode("utf-8")) > MAX_DIGEST_BYTES:
        raise ValueError(f"digest exceeds {MAX_DIGEST_BYTES} bytes")
    return digest
