"""Query validation against the unified schema.

Validation never raises: every problem is collected into the returned
ValidationReport with a machine-readable code and a dotted path to the
offending selection. Top-level names may be canonical endpoints or alias
table keys; applied aliases are reported in resolved_aliases.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from finops_agent.schema_core.query import FieldSelection, QueryDocument
from finops_agent.schema_core.sdl import SCALARS, EndpointDef, TypeRef, UnifiedSchema

ROOT_PATH = "$"


@dataclass(frozen=True)
class ValidationIssue:
    code: str
    path: str
    message: str


@dataclass(frozen=True)
class ValidationReport:
    valid: bool
    errors: tuple[ValidationIssue, ...] = ()
    resolved_aliases: dict[str, str] = field(default_factory=dict)


def validate_query(doc: QueryDocument, schema: UnifiedSchema) -> ValidationReport:
    """Check a parsed query against the schema; failures are reported, never thrown."""
    errors: list[ValidationIssue] = []
    resolved: dict[str, str] = {}

    if not doc.selections:
        errors.append(ValidationIssue("EmptySelection", ROOT_PATH, "query has no selections"))
        return ValidationReport(valid=False, errors=tuple(errors))

    for sel in doc.selections:
        path = sel.response_key
        resolution = schema.resolve_endpoint(sel.name)
        if resolution is None:
            errors.append(
                ValidationIssue("UnknownEndpoint", path, f"{sel.name!r} is not an endpoint or a known alias")
            )
            continue
        canonical, endpoint = resolution
        if canonical != sel.name:
            resolved[sel.name] = canonical
        _check_arguments(sel, endpoint, schema, path, errors)
        _check_selection_body(sel, endpoint.return_type, schema, path, errors)

    return ValidationReport(valid=not errors, errors=tuple(errors), resolved_aliases=resolved)


def _check_arguments(
    sel: FieldSelection,
    endpoint: EndpointDef,
    schema: UnifiedSchema,
    path: str,
    errors: list[ValidationIssue],
) -> None:
    seen: set[str] = set()
    for arg in sel.arguments:
        decl = schema.find_arg(endpoint, arg.name)
        if decl is None:
            errors.append(
                ValidationIssue("UnknownArgument", path, f"{endpoint.name!r} has no argument {arg.name!r}")
            )
            continue
        seen.add(decl.name)
        if not _scalar_accepts(decl.type.name, arg.value):
            errors.append(
                ValidationIssue(
                    "ArgumentTypeMismatch",
                    path,
                    f"argument {arg.name!r} expects {decl.type.name}, got {type(arg.value).__name__}",
                )
            )
    for decl in endpoint.args:
        if decl.required and decl.name not in seen:
            errors.append(
                ValidationIssue("MissingArgument", path, f"{endpoint.name!r} requires argument {decl.name!r}")
            )


def _scalar_accepts(scalar: str, value: object) -> bool:
    # Int widens to Float; nothing narrows. bool is checked first because
    # it subclasses int in Python.
    if isinstance(value, bool):
        return scalar == "Boolean"
    if scalar == "String":
        return isinstance(value, str)
    if scalar == "Int":
        return isinstance(value, int)
    if scalar == "Float":
        return isinstance(value, (int, float))
    if scalar == "Boolean":
        return False
    if scalar == "ID":
        return isinstance(value, (str, int))
    return False


def _check_selection_body(
    sel: FieldSelection,
    return_type: TypeRef,
    schema: UnifiedSchema,
    path: str,
    errors: list[ValidationIssue],
) -> None:
    if return_type.name in SCALARS:
        if sel.selections:
            errors.append(
                ValidationIssue("SelectionOnScalar", path, f"{sel.name!r} returns {return_type.name}, no subfields")
            )
        return

    type_def = schema.type_def(return_type.name)
    if type_def is None:
        errors.append(ValidationIssue("UnknownField", path, f"return type {return_type.name!r} is not declared"))
        return
    if not sel.selections:
        errors.append(
            ValidationIssue(
                "MissingSubselection", path, f"{sel.name!r} returns {return_type.name}, a selection set is required"
            )
        )
        return
    for child in sel.selections:
        child_path = f"{path}.{child.response_key}"
        fdef = type_def.field(child.name)
        if fdef is None:
            errors.append(
                ValidationIssue("UnknownField", child_path, f"type {type_def.name!r} has no field {child.name!r}")
            )
            continue
        if child.arguments:
            errors.append(ValidationIssue("UnknownArgument", child_path, "fields do not take arguments"))
        _check_selection_body(child, fdef.type, schema, child_path, errors)
