"""Response merging and deduplication of unified records."""

from __future__ import annotations

from typing import Any, Hashable, Mapping

from finops_agent.errors import FinopsError
from finops_agent.gateway.naming import normalize_name


class KeyConflictError(FinopsError):
    """Two records share a dedup key but disagree on a non-null scalar field."""


def dedup_key(record: Mapping[str, Any]) -> Hashable:
    """Dedup key of a unified record: its id when present, else the
    normalized (application, resource/target) pair."""
    rec_id = record.get("id")
    if rec_id is not None:
        return ("id", rec_id)
    app = normalize_name(str(record.get("application") or ""))
    resource = record.get("resource")
    if resource is None:
        resource = record.get("target")
    return ("composite", app, normalize_name(str(resource or ""), "entity"))


def merge_and_dedupe(records: list[Mapping[str, Any]]) -> list[Mapping[str, Any]]:
    """Collapse records with equal dedup keys; first occurrence wins and
    relative order is preserved.

    Raises KeyConflictError when two records share a key but carry
    different non-null values for the same scalar field.
    """
    out: list[Mapping[str, Any]] = []
    first_by_key: dict[Hashable, Mapping[str, Any]] = {}
    for record in records:
        key = dedup_key(record)
        kept = first_by_key.get(key)
        if kept is None:
            first_by_key[key] = record
            out.append(record)
            continue
        for field in set(kept) | set(record):
            a = kept.get(field)
            b = record.get(field)
            if a is None or b is None:
                continue
            if isinstance(a, (str, int, float, bool)) and a != b:
                raise KeyConflictError(f"records with key {key!r} disagree on {field!r}: {a!r} vs {b!r}")
    return out
