"""Mock Turbonomic and Apptio backends.

Fixture data is loaded from two JSON files into an immutable VendorStore;
the turbo_* / apptio_* functions are the vendor-shaped read interfaces
the gateway resolvers call. Wire field names in the JSON are camelCase
(matching the unified schema); store attributes are snake_case.

costImpact sign convention: negative means savings.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from datetime import datetime
from pathlib import Path

from finops_agent.errors import FinopsError


class MissingFileError(FinopsError):
    """A required fixture file is absent."""


class SchemaViolationError(FinopsError):
    """A fixture record does not match the expected shape."""

    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}")
        self.path = path


class ReferentialError(FinopsError):
    """A record references an entity or application that does not exist."""


class ConflictingFiltersError(FinopsError):
    """Both entity_name and app_name were supplied to the actions lookup."""


@dataclass(frozen=True)
class EntityRec:
    id: int
    name: str
    description: str | None
    cost: float | None
    user_id: str


@dataclass(frozen=True)
class ActionRec:
    id: str
    name: str | None
    action_type: str | None
    category: str | None
    severity: str | None
    risk: str | None
    target: str | None
    cost_impact: float | None
    business_criticality: str | None


@dataclass(frozen=True)
class AnomalyRec:
    id: str
    application: str | None
    anomaly_type: str | None
    anomaly_value: float | None
    timestamp: str | None


@dataclass(frozen=True)
class CommitmentRec:
    id: str
    service: str | None
    current_coverage: float | None
    recommended_commitment: float | None
    potential_savings: float | None


@dataclass(frozen=True)
class RightsizingRec:
    id: str
    resource: str | None
    current_utilization: float | None
    recommended_size: str | None
    estimated_savings: float | None


@dataclass(frozen=True)
class VendorStore:
    applications: tuple[str, ...]
    entities: dict[str, tuple[EntityRec, ...]]
    actions: tuple[ActionRec, ...]
    anomalies: tuple[AnomalyRec, ...]
    commitments: tuple[CommitmentRec, ...]
    rightsizings: tuple[RightsizingRec, ...]

    def entity_names(self) -> set[str]:
        return {e.name for app in self.entities.values() for e in app}


def _field(obj: dict, path: str, key: str, kind: type | tuple[type, ...], required: bool = True):
    if key not in obj or obj[key] is None:
        if required:
            raise SchemaViolationError(f"{path}.{key}", "missing required field")
        return None
    value = obj[key]
    if kind is float and isinstance(value, int) and not isinstance(value, bool):
        value = float(value)
    if isinstance(value, bool) and kind in (int, float):
        raise SchemaViolationError(f"{path}.{key}", f"expected {getattr(kind, '__name__', kind)}, got bool")
    if not isinstance(value, kind):
        expected = kind.__name__ if isinstance(kind, type) else "/".join(k.__name__ for k in kind)
        raise SchemaViolationError(f"{path}.{key}", f"expected {expected}, got {type(value).__name__}")
    return value


def _fraction(obj: dict, path: str, key: str) -> float:
    value = _field(obj, path, key, float)
    if not 0.0 <= value <= 1.0:
        raise SchemaViolationError(f"{path}.{key}", f"fraction out of [0,1]: {value}")
    return value


def _nonnegative(obj: dict, path: str, key: str) -> float:
    value = _field(obj, path, key, float)
    if value < 0:
        raise SchemaViolationError(f"{path}.{key}", f"must be >= 0, got {value}")
    return value


def load_fixtures(path: str | Path) -> VendorStore:
    """Load turbonomic.json and apptio.json from a directory into a VendorStore.

    Raises MissingFileError, SchemaViolationError on malformed records, and
    ReferentialError when a target/resource/application reference dangles.
    """
    base = Path(path)
    turbo_path = base / "turbonomic.json"
    apptio_path = base / "apptio.json"
    for p in (turbo_path, apptio_path):
        if not p.is_file():
            raise MissingFileError(f"fixture file not found: {p}")
    turbo = json.loads(turbo_path.read_text(encoding="utf-8"))
    apptio = json.loads(apptio_path.read_text(encoding="utf-8"))

    applications = tuple(_field(turbo, "turbonomic", "applications", list))
    for i, app in enumerate(applications):
        if not isinstance(app, str):
            raise SchemaViolationError(f"turbonomic.applications[{i}]", "expected string")

    entities: dict[str, tuple[EntityRec, ...]] = {}
    raw_entities = _field(turbo, "turbonomic", "entities", dict)
    for app, records in raw_entities.items():
        if app not in applications:
            raise ReferentialError(f"entities for unknown application {app!r}")
        parsed = []
        for i, rec in enumerate(records):
            p = f"turbonomic.entities[{app}][{i}]"
            parsed.append(
                EntityRec(
                    id=_field(rec, p, "id", int),
                    name=_field(rec, p, "name", str),
                    description=_field(rec, p, "description", str, required=False),
                    cost=_nonnegative(rec, p, "cost") if rec.get("cost") is not None else None,
                    user_id=_field(rec, p, "user_id", str),
                )
            )
        entities[app] = tuple(parsed)

    actions = []
    for i, rec in enumerate(_field(turbo, "turbonomic", "actions", list)):
        p = f"turbonomic.actions[{i}]"
        actions.append(
            ActionRec(
                id=_field(rec, p, "id", str),
                name=_field(rec, p, "name", str, required=False),
                action_type=_field(rec, p, "actionType", str, required=False),
                category=_field(rec, p, "category", str, required=False),
                severity=_field(rec, p, "severity", str, required=False),
                risk=_field(rec, p, "risk", str, required=False),
                target=_field(rec, p, "target", str, required=False),
                cost_impact=_field(rec, p, "costImpact", float, required=False),
                business_criticality=_field(rec, p, "businessCriticality", str, required=False),
            )
        )

    anomalies = []
    for i, rec in enumerate(_field(apptio, "apptio", "anomalies", list)):
        p = f"apptio.anomalies[{i}]"
        anomalies.append(
            AnomalyRec(
                id=_field(rec, p, "id", str),
                application=_field(rec, p, "application", str, required=False),
                anomaly_type=_field(rec, p, "anomalyType", str, required=False),
                anomaly_value=_field(rec, p, "anomalyValue", float, required=False),
                timestamp=_field(rec, p, "timestamp", str, required=False),
            )
        )
        ts = anomalies[-1].timestamp
        if ts is not None:
            try:
                datetime.fromisoformat(ts.replace("Z", "+00:00"))
            except ValueError:
                raise SchemaViolationError(f"{p}.timestamp", f"not ISO-8601: {ts!r}") from None

    commitments = []
    for i, rec in enumerate(_field(apptio, "apptio", "commitments", list)):
        p = f"apptio.commitments[{i}]"
        commitments.append(
            CommitmentRec(
                id=_field(rec, p, "id", str),
                service=_field(rec, p, "service", str, required=False),
                current_coverage=_fraction(rec, p, "currentCoverage"),
                recommended_commitment=_fraction(rec, p, "recommendedCommitment"),
                potential_savings=_nonnegative(rec, p, "potentialSavings"),
            )
        )

    rightsizings = []
    for i, rec in enumerate(_field(apptio, "apptio", "rightsizings", list)):
        p = f"apptio.rightsizings[{i}]"
        rightsizings.append(
            RightsizingRec(
                id=_field(rec, p, "id", str),
                resource=_field(rec, p, "resource", str),
                current_utilization=_fraction(rec, p, "currentUtilization"),
                recommended_size=_field(rec, p, "recommendedSize", str, required=False),
                estimated_savings=_nonnegative(rec, p, "estimatedSavings"),
            )
        )

    store = VendorStore(
        applications=applications,
        entities=entities,
        actions=tuple(actions),
        anomalies=tuple(anomalies),
        commitments=tuple(commitments),
        rightsizings=tuple(rightsizings),
    )
    _check_references(store)
    return store


def _check_references(store: VendorStore) -> None:
    entity_names = store.entity_names()
    for action in store.actions:
        if action.target is not None and action.target not in entity_names:
            raise ReferentialError(f"action {action.id} targets unknown entity {action.target!r}")
    for rs in store.rightsizings:
        if rs.resource not in entity_names:
            raise ReferentialError(f"rightsizing {rs.id} references unknown entity {rs.resource!r}")
    for anomaly in store.anomalies:
        if anomaly.application is not None and anomaly.application not in store.applications:
            raise ReferentialError(f"anomaly {anomaly.id} references unknown application {anomaly.application!r}")


def turbo_list_applications(store: VendorStore) -> list[str]:
    """Catalog of business applications, in fixture order."""
    return list(store.applications)


def turbo_list_entities(store: VendorStore, application_name: str) -> list[EntityRec]:
    """Entities for one application; unknown applications yield an empty list."""
    return list(store.entities.get(application_name, ()))


def turbo_list_actions(
    store: VendorStore, entity_name: str | None = None, app_name: str | None = None
) -> list[ActionRec]:
    """Optimization actions, filtered by target entity or by application.

    At most one filter may be supplied; with neither, all actions are
    returned.
    """
    if entity_name is not None and app_name is not None:
        raise ConflictingFiltersError("supply at most one of entity_name and app_name")
    if entity_name is not None:
        return [a for a in store.actions if a.target == entity_name]
    if app_name is not None:
        names = {e.name for e in store.entities.get(app_name, ())}
        return [a for a in store.actions if a.target in names]
    return list(store.actions)


def apptio_list_anomalies(store: VendorStore, app_name: str | None = None) -> list[AnomalyRec]:
    """Spending anomaly events, optionally for one application."""
    if app_name is None:
        return list(store.anomalies)
    return [a for a in store.anomalies if a.application == app_name]


def apptio_list_commitments(store: VendorStore) -> list[CommitmentRec]:
    """Reserved instance / savings plan coverage recommendations."""
    return list(store.commitments)


def apptio_list_rightsizings(store: VendorStore, app_name: str | None = None) -> list[RightsizingRec]:
    """Rightsizing recommendations, optionally for one application's entities."""
    if app_name is None:
        return list(store.rightsizings)
    names = {e.name for e in store.entities.get(app_name, ())}
    return [r for r in store.rightsizings if r.resource in names]
