"""Unified FinOps GraphQL schema: parsing, introspection, query validation."""

from finops_agent.schema_core.digest import TOOL_DESCRIPTIONS, DigestEntry, SchemaDigest, introspect
from finops_agent.schema_core.lexer import GraphQLSyntaxError
from finops_agent.schema_core.query import (
    Argument,
    FieldSelection,
    QueryDocument,
    UnsupportedConstructError,
    parse_query,
    render_query,
)
from finops_agent.schema_core.sdl import (
    CANONICAL_ENDPOINTS,
    ENDPOINT_VENDORS,
    ArgDef,
    DuplicateDefinitionError,
    EndpointDef,
    FieldDef,
    SchemaConformanceError,
    TypeDef,
    TypeRef,
    UnifiedSchema,
    UnknownTypeReferenceError,
    check_unified,
    load_unified,
    parse_schema,
)
from finops_agent.schema_core.validate import ValidationIssue, ValidationReport, validate_query

__all__ = [
    "ArgDef",
    "Argument",
    "CANONICAL_ENDPOINTS",
    "DigestEntry",
    "DuplicateDefinitionError",
    "ENDPOINT_VENDORS",
    "EndpointDef",
    "FieldDef",
    "FieldSelection",
    "GraphQLSyntaxError",
    "QueryDocument",
    "SchemaConformanceError",
    "SchemaDigest",
    "TOOL_DESCRIPTIONS",
    "TypeDef",
    "TypeRef",
    "UnifiedSchema",
    "UnknownTypeReferenceError",
    "UnsupportedConstructError",
    "ValidationIssue",
    "ValidationReport",
    "check_unified",
    "introspect",
    "load_unified",
    "parse_query",
    "parse_schema",
    "render_query",
    "validate_query",
]
