"""Consolidation of retrieval observations into one cross-vendor dataset.

Records are grouped by normalized application name. Actions and
rightsizing entries, which only carry an entity name, are joined to
their application through the entity map built from get_entities
observations (falling back to the app_name filter of the call that
fetched them). Commitments stay global. Per-type deduplication reuses
the gateway merge rules; a merge conflict becomes a dataset annotation
instead of an error.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any, Iterable, Mapping

from finops_agent.gateway.merge import KeyConflictError, dedup_key, merge_and_dedupe
from finops_agent.gateway.naming import normalize_name
from finops_agent.orchestrator.tools import Observation, ObservationSection

RECORD_TYPES = ("entities", "actions", "anomalies", "rightsizings")


def norm_id(value: Any) -> str:
    return str(value).strip().casefold()


@dataclass(frozen=True)
class AppView:
    application: str  # display name, first seen
    entities: tuple[Mapping[str, Any], ...] = ()
    actions: tuple[Mapping[str, Any], ...] = ()
    anomalies: tuple[Mapping[str, Any], ...] = ()
    rightsizings: tuple[Mapping[str, Any], ...] = ()


@dataclass(frozen=True)
class ConsolidatedDataset:
    applications: tuple[str, ...] = ()  # display names, discovery order
    apps: Mapping[str, AppView] = field(default_factory=dict)  # key: normalized name
    commitments: tuple[Mapping[str, Any], ...] = ()
    unattributed: tuple[Mapping[str, Any], ...] = ()
    annotations: tuple[str, ...] = ()
    provenance: Mapping[str, tuple[int, ...]] = field(default_factory=dict)

    @property
    def is_empty(self) -> bool:
        no_app_records = all(
            not getattr(view, t) for view in self.apps.values() for t in RECORD_TYPES
        )
        return no_app_records and not self.commitments and not self.unattributed

    def to_payload(self) -> dict[str, Any]:
        return {
            "applications": list(self.applications),
            "per_application": [
                {
                    "application": view.application,
                    "entities": [dict(r) for r in view.entities],
                    "actions": [dict(r) for r in view.actions],
                    "anomalies": [dict(r) for r in view.anomalies],
                    "rightsizings": [dict(r) for r in view.rightsizings],
                }
                for _, view in sorted(self.apps.items())
            ],
            "commitments": [dict(r) for r in self.commitments],
            "unattributed": [dict(r) for r in self.unattributed],
            "annotations": list(self.annotations),
            "provenance": {k: list(v) for k, v in sorted(self.provenance.items())},
        }

    def to_json(self) -> str:
        return json.dumps(self.to_payload(), ensure_ascii=False, indent=2)


def key_sets(dataset: ConsolidatedDataset) -> dict[str, frozenset]:
    """Per-type comparison keys: normalized ids, app-qualified where grouped."""
    out: dict[str, frozenset] = {
        "applications": frozenset(normalize_name(a) for a in dataset.applications),
        "commitments": frozenset(norm_id(r.get("id")) for r in dataset.commitments),
    }
    for rtype in RECORD_TYPES:
        keys = set()
        for app_key, view in dataset.apps.items():
            for rec in getattr(view, rtype):
                keys.add((app_key, norm_id(rec.get("id"))))
        out[rtype] = frozenset(keys)
    return out


def dataset_equal(a: ConsolidatedDataset, b: ConsolidatedDataset) -> bool:
    """Set equality per record type, ids compared after normalization."""
    return key_sets(a) == key_sets(b)


def _find_arg(args: Mapping[str, Any], name: str) -> Any:
    folded = name.replace("_", "").lower()
    for key, value in args.items():
        if key.replace("_", "").lower() == folded:
            return value
    return None


class _Builder:
    def __init__(self) -> None:
        self.order: list[str] = []  # normalized app keys, discovery order
        self.display: dict[str, str] = {}
        self.buckets: dict[str, dict[str, list]] = {}
        self.commitments: list = []
        self.unattributed: list = []
        self.annotations: list[str] = []
        self.provenance: dict[str, set[int]] = {}
        self.entity_app: dict[str, str] = {}  # normalized entity name -> app key

    def app_key(self, display_name: str) -> str:
        key = normalize_name(display_name)
        if key not in self.buckets:
            self.order.append(key)
            self.display[key] = display_name
            self.buckets[key] = {t: [] for t in RECORD_TYPES}
        return key

    def note(self, rtype: str, record: Mapping[str, Any], iteration: int) -> None:
        key = f"{rtype}:{norm_id(record.get('id'))}"
        self.provenance.setdefault(key, set()).add(iteration)


def _sections(observations: Iterable[Observation]) -> Iterable[tuple[int, ObservationSection]]:
    for obs in observations:
        for section in obs.sections:
            if section.error is None:
                yield obs.iteration, section


def consolidate(observations: Iterable[Observation]) -> ConsolidatedDataset:
    """Join every successful observation section into one dataset."""
    b = _Builder()
    sections = list(_sections(observations))

    # Pass 1: applications and entities establish the join keys.
    for iteration, section in sections:
        if section.endpoint == "get_applications_names":
            for name in section.records:
                if isinstance(name, str):
                    b.app_key(name)
        elif section.endpoint == "get_entities":
            app_name = _find_arg(section.args, "application_name")
            if app_name is None:
                b.annotations.append("entities observation without application_name; skipped")
                continue
            key = b.app_key(str(app_name))
            for rec in section.records:
                b.buckets[key]["entities"].append(rec)
                b.entity_app[normalize_name(str(rec.get("name") or ""), "entity")] = key
                b.note("entities", rec, iteration)

    # Pass 2: everything else joins through entity names or its own fields.
    for iteration, section in sections:
        if section.endpoint == "get_actions":
            fallback = _find_arg(section.args, "app_name")
            for rec in section.records:
                target = normalize_name(str(rec.get("target") or ""), "entity")
                key = b.entity_app.get(target)
                if key is None and fallback is not None:
                    key = b.app_key(str(fallback))
                if key is None:
                    b.unattributed.append(rec)
                else:
                    b.buckets[key]["actions"].append(rec)
                b.note("actions", rec, iteration)
        elif section.endpoint == "get_spending_anomaly_events":
            fallback = _find_arg(section.args, "app_name")
            for rec in section.records:
                app = rec.get("application") or fallback
                if app is None:
                    b.unattributed.append(rec)
                else:
                    b.buckets[b.app_key(str(app))]["anomalies"].append(rec)
                b.note("anomalies", rec, iteration)
        elif section.endpoint == "get_rightsizing_recommendations":
            fallback = _find_arg(section.args, "app_name")
            for rec in section.records:
                resource = normalize_name(str(rec.get("resource") or ""), "entity")
                key = b.entity_app.get(resource)
                if key is None and fallback is not None:
                    key = b.app_key(str(fallback))
                if key is None:
                    b.unattributed.append(rec)
                else:
                    b.buckets[key]["rightsizings"].append(rec)
                b.note("rightsizings", rec, iteration)
        elif section.endpoint == "get_commitment_recommendations":
            for rec in section.records:
                b.commitments.append(rec)
                b.note("commitments", rec, iteration)

    def dedupe(records: list, label: str) -> tuple:
        try:
            return tuple(merge_and_dedupe(records))
        except KeyConflictError as exc:
            b.annotations.append(f"{label}: {exc}")
            seen: set = set()
            kept = []
            for rec in records:
                k = dedup_key(rec)
                if k not in seen:
                    seen.add(k)
                    kept.append(rec)
            return tuple(kept)

    apps = {}
    for key in b.order:
        bucket = b.buckets[key]
        apps[key] = AppView(
            application=b.display[key],
            entities=dedupe(bucket["entities"], f"entities[{key}]"),
            actions=dedupe(bucket["actions"], f"actions[{key}]"),
            anomalies=dedupe(bucket["anomalies"], f"anomalies[{key}]"),
            rightsizings=dedupe(bucket["rightsizings"], f"rightsizings[{key}]"),
        )

    return ConsolidatedDataset(
        applications=tuple(b.display[k] for k in b.order),
        apps=apps,
        commitments=dedupe(b.commitments, "commitments"),
        unattributed=dedupe(b.unattributed, "unattributed"),
        annotations=tuple(b.annotations),
        provenance={k: tuple(sorted(v)) for k, v in b.provenance.items()},
    )
