"""Federated execution of unified-schema queries over the vendor adapters."""

from finops_agent.gateway.execute import PathError, Provenance, ResultDocument, execute_query
from finops_agent.gateway.mapping import ENDPOINT_MAPPINGS, FieldMapping, check_mappings, to_unified
from finops_agent.gateway.merge import KeyConflictError, dedup_key, merge_and_dedupe
from finops_agent.gateway.naming import normalize_name

__all__ = [
    "ENDPOINT_MAPPINGS",
    "FieldMapping",
    "KeyConflictError",
    "PathError",
    "Provenance",
    "ResultDocument",
    "check_mappings",
    "dedup_key",
    "execute_query",
    "merge_and_dedupe",
    "normalize_name",
    "to_unified",
]
