"""Mock vendor backends serving fixture data through read-only interfaces."""

from finops_agent.vendors.store import (
    ActionRec,
    AnomalyRec,
    CommitmentRec,
    ConflictingFiltersError,
    EntityRec,
    MissingFileError,
    ReferentialError,
    RightsizingRec,
    SchemaViolationError,
    VendorStore,
    apptio_list_anomalies,
    apptio_list_commitments,
    apptio_list_rightsizings,
    load_fixtures,
    turbo_list_actions,
    turbo_list_applications,
    turbo_list_entities,
)

__all__ = [
    "ActionRec",
    "AnomalyRec",
    "CommitmentRec",
    "ConflictingFiltersError",
    "EntityRec",
    "MissingFileError",
    "ReferentialError",
    "RightsizingRec",
    "SchemaViolationError",
    "VendorStore",
    "apptio_list_anomalies",
    "apptio_list_commitments",
    "apptio_list_rightsizings",
    "load_fixtures",
    "turbo_list_actions",
    "turbo_list_applications",
    "turbo_list_entities",
]
