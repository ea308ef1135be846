"""The analysis agent: turn the consolidated dataset into optimization records.

The model proposes records as JSON; every record is re-validated here
and invalid ones are dropped and counted, so whatever reaches the caller
satisfies the record invariants. When a rightsizing record and a resize
action address the same entity, they collapse into one record carrying
the larger savings figure, so the same saving is never counted twice.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Any, Mapping

from finops_agent.errors import FinopsError
from finops_agent.gateway.naming import normalize_name
from finops_agent.llm.base import ChatMessage, CompletionParams, LlmBackend
from finops_agent.orchestrator.consolidate import ConsolidatedDataset, norm_id

CATEGORIES = ("rightsizing", "commitment", "anomaly_remediation", "placement", "decommission")
PRIORITIES = ("low", "medium", "high")

FIELD_ORDER = (
    "short_description",
    "description",
    "category",
    "application",
    "estimated_savings",
    "priority",
    "source_refs",
)

_FENCE_RE = re.compile(r"```(?:[a-zA-Z0-9_-]*)\n(.*?)```", re.DOTALL)


class RecordValidationError(FinopsError):
    """A proposed record violates the record invariants."""


class NoRecommendationsError(FinopsError):
    """Zero valid records survived validation."""


@dataclass(frozen=True)
class RecommendationRecord:
    short_description: str
    description: str
    category: str
    application: str
    estimated_savings: float
    priority: str
    source_refs: tuple[str, ...]


@dataclass(frozen=True)
class RecommendResult:
    records: tuple[RecommendationRecord, ...]
    dropped: int
    raw_response: str


def parse_record(obj: Mapping[str, Any]) -> RecommendationRecord:
    """Validate one proposed record; raises RecordValidationError on any gap."""
    if not isinstance(obj, Mapping):
        raise RecordValidationError(f"record must be an object, got {type(obj).__name__}")
    missing = [f for f in FIELD_ORDER if f not in obj or obj[f] is None]
    if missing:
        raise RecordValidationError(f"missing fields: {', '.join(missing)}")
    for f in ("short_description", "description", "application"):
        if not isinstance(obj[f], str) or not obj[f].strip():
            raise RecordValidationError(f"{f} must be a non-empty string")
    if obj["category"] not in CATEGORIES:
        raise RecordValidationError(f"category {obj['category']!r} not in {CATEGORIES}")
    if obj["priority"] not in PRIORITIES:
        raise RecordValidationError(f"priority {obj['priority']!r} not in {PRIORITIES}")
    savings = obj["estimated_savings"]
    if isinstance(savings, bool) or not isinstance(savings, (int, float)):
        raise RecordValidationError("estimated_savings must be a number")
    if savings < 0:
        raise RecordValidationError(f"estimated_savings must be >= 0, got {savings}")
    refs = obj["source_refs"]
    if not isinstance(refs, (list, tuple)) or not refs:
        raise RecordValidationError("source_refs must be a non-empty list")
    if not all(isinstance(r, str) and r.strip() for r in refs):
        raise RecordValidationError("source_refs entries must be non-empty strings")
    return RecommendationRecord(
        short_description=obj["short_description"],
        description=obj["description"],
        category=obj["category"],
        application=obj["application"],
        estimated_savings=float(savings),
        priority=obj["priority"],
        source_refs=tuple(refs),
    )


def record_to_dict(rec: RecommendationRecord) -> dict[str, Any]:
    out: dict[str, Any] = {}
    for f in FIELD_ORDER:
        value = getattr(rec, f)
        out[f] = list(value) if isinstance(value, tuple) else value
    return out


def render_line(rec: RecommendationRecord) -> str:
    return json.dumps(record_to_dict(rec), ensure_ascii=False)


def emit_records(records: list[RecommendationRecord] | tuple[RecommendationRecord, ...], path: str | Path) -> Path:
    """Write records as JSON lines with stable field order; empty input makes an empty file."""
    out = Path(path)
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text("".join(render_line(r) + "\n" for r in records), encoding="utf-8")
    return out


def _ref_targets(dataset: ConsolidatedDataset) -> dict[str, str]:
    """Fixture id -> normalized entity name, for resize actions and rightsizings."""
    targets: dict[str, str] = {}
    views = list(dataset.apps.values())
    for view in views:
        for rec in view.actions:
            if str(rec.get("actionType") or "").upper() == "RESIZE" and rec.get("target"):
                targets[norm_id(rec["id"])] = normalize_name(str(rec["target"]), "entity")
        for rec in view.rightsizings:
            if rec.get("resource"):
                targets[norm_id(rec["id"])] = normalize_name(str(rec["resource"]), "entity")
    return targets


def apply_overlap_rule(
    records: list[RecommendationRecord], dataset: ConsolidatedDataset
) -> list[RecommendationRecord]:
    """Collapse rightsizing records that address the same entity.

    Overlap means: same application, category rightsizing, and source
    refs that resolve (through the dataset) to a shared entity. The
    survivor keeps the first record's wording, the larger savings, and
    the union of source refs.
    """
    targets = _ref_targets(dataset)
    merged: list[RecommendationRecord] = []
    merged_targets: list[set[str]] = []
    for rec in records:
        rec_targets = {targets[norm_id(r)] for r in rec.source_refs if norm_id(r) in targets}
        absorbed = False
        if rec.category == "rightsizing" and rec_targets:
            for i, kept in enumerate(merged):
                if (
                    kept.category == "rightsizing"
                    and normalize_name(kept.application) == normalize_name(rec.application)
                    and merged_targets[i] & rec_targets
                ):
                    extra = tuple(r for r in rec.source_refs if r not in kept.source_refs)
                    merged[i] = replace(
                        kept,
                        estimated_savings=max(kept.estimated_savings, rec.estimated_savings),
                        source_refs=kept.source_refs + extra,
                    )
                    merged_targets[i] |= rec_targets
                    absorbed = True
                    break
        if not absorbed:
            merged.append(rec)
            merged_targets.append(rec_targets)
    return merged


_ANALYSIS_RULES = """\
You are the analysis agent of a FinOps assistant. Using only the
consolidated dataset below, propose optimization records.
Reply with a JSON array; each element must have exactly these fields:
  short_description (string), description (string),
  category (one of: {categories}),
  application (string; use "all-applications" for fleet-wide records),
  estimated_savings (number, USD per month, >= 0),
  priority (one of: {priorities}),
  source_refs (non-empty array of record ids from the dataset).
Savings must never be negative. Do not invent record ids.
"""


def recommend(
    dataset: ConsolidatedDataset,
    constraints: Mapping[str, Any],
    backend: LlmBackend,
    params: CompletionParams | None = None,
) -> RecommendResult:
    """Ask the analysis model for records, validate each, merge overlaps.

    Raises NoRecommendationsError when the dataset is empty or no valid
    record survives.
    """
    if dataset.is_empty:
        raise NoRecommendationsError("the consolidated dataset holds no records")
    system = _ANALYSIS_RULES.format(categories=", ".join(CATEGORIES), priorities=", ".join(PRIORITIES))
    user = (
        "Consolidated dataset:\n"
        + dataset.to_json()
        + "\n\nConstraints:\n"
        + json.dumps(dict(constraints), ensure_ascii=False, sort_keys=True)
    )
    response = backend.complete([ChatMessage("system", system), ChatMessage("user", user)], params or CompletionParams())

    m = _FENCE_RE.search(response)
    body = m.group(1).strip() if m else response.strip()
    try:
        proposed = json.loads(body)
    except json.JSONDecodeError as exc:
        raise NoRecommendationsError(f"analysis response is not valid JSON: {exc}") from None
    if not isinstance(proposed, list):
        raise NoRecommendationsError("analysis response must be a JSON array of records")

    records: list[RecommendationRecord] = []
    dropped = 0
    for item in proposed:
        try:
            records.append(parse_record(item))
        except RecordValidationError:
            dropped += 1
    records = apply_overlap_rule(records, dataset)
    if not records:
        raise NoRecommendationsError(f"no valid records survived validation ({dropped} dropped)")
    return RecommendResult(records=tuple(records), dropped=dropped, raw_response=response)
