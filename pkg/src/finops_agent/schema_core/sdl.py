"""SDL parsing and the in-memory model of the unified FinOps schema.

The accepted SDL subset is what the unified schema needs: object type
definitions, a Query type, and `extend type Query` blocks. Fields may
declare scalar arguments. Everything is immutable after parsing, so a
schema can be shared freely across request handlers.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from pathlib import Path
from types import MappingProxyType
from typing import Mapping

from finops_agent.errors import FinopsError
from finops_agent.schema_core.lexer import GraphQLSyntaxError, Token, TokenStream, tokenize

SCALARS = frozenset({"Int", "Float", "String", "Boolean", "ID"})

# The six canonical query endpoints the unified schema must expose, and
# the vendor whose adapter backs each one.
ENDPOINT_VENDORS: Mapping[str, str] = MappingProxyType(
    {
        "get_applications_names": "turbonomic",
        "get_entities": "turbonomic",
        "get_actions": "turbonomic",
        "get_spending_anomaly_events": "apptio",
        "get_commitment_recommendations": "apptio",
        "get_rightsizing_recommendations": "apptio",
    }
)

CANONICAL_ENDPOINTS = frozenset(ENDPOINT_VENDORS)


class DuplicateDefinitionError(FinopsError):
    """A type, field, or endpoint name was declared twice."""


class UnknownTypeReferenceError(FinopsError):
    """A field or endpoint references a type that is never declared."""


class SchemaConformanceError(FinopsError):
    """The parsed schema is valid SDL but not the unified FinOps schema."""


@dataclass(frozen=True)
class TypeRef:
    name: str
    is_list: bool = False
    non_null: bool = False        # outer ! (on the list when is_list)
    inner_non_null: bool = False  # ! on the element type inside a list

    def render(self) -> str:
        inner = self.name + ("!" if (self.inner_non_null if self.is_list else False) else "")
        out = f"[{inner}]" if self.is_list else self.name
        return out + ("!" if self.non_null else "")


@dataclass(frozen=True)
class FieldDef:
    name: str
    type: TypeRef


@dataclass(frozen=True)
class TypeDef:
    name: str
    fields: tuple[FieldDef, ...]

    def field(self, name: str) -> FieldDef | None:
        for f in self.fields:
            if f.name == name:
                return f
        return None


@dataclass(frozen=True)
class ArgDef:
    name: str
    type: TypeRef

    @property
    def required(self) -> bool:
        return self.type.non_null


@dataclass(frozen=True)
class EndpointDef:
    name: str
    args: tuple[ArgDef, ...]
    return_type: TypeRef
    source_vendor: str = ""

    def signature(self) -> str:
        args = ", ".join(f"{a.name}: {a.type.render()}" for a in self.args)
        return f"{self.name}({args})" if args else f"{self.name}()"


def _arg_key(name: str) -> str:
    """Key under which argument names are matched.

    Case and underscores are ignored so callers may spell `app_name` as
    `appName` and vendor-style camelCase queries stay valid. Endpoint and
    field names are always matched exactly, never through this folding.
    """
    return name.replace("_", "").lower()


@dataclass(frozen=True)
class UnifiedSchema:
    types: tuple[TypeDef, ...]
    endpoints: tuple[EndpointDef, ...]
    alias_table: Mapping[str, str] = field(default_factory=dict)

    def type_def(self, name: str) -> TypeDef | None:
        for t in self.types:
            if t.name == name:
                return t
        return None

    def endpoint(self, name: str) -> EndpointDef | None:
        for e in self.endpoints:
            if e.name == name:
                return e
        return None

    def resolve_endpoint(self, name: str) -> tuple[str, EndpointDef] | None:
        """Resolve a query-level name to (canonical name, endpoint), applying the alias table."""
        canonical = self.alias_table.get(name, name)
        ep = self.endpoint(canonical)
        if ep is None:
            return None
        return canonical, ep

    def find_arg(self, endpoint: EndpointDef, name: str) -> ArgDef | None:
        key = _arg_key(name)
        for a in endpoint.args:
            if _arg_key(a.name) == key:
                return a
        return None

    def with_aliases(self, alias_table: Mapping[str, str]) -> "UnifiedSchema":
        for alias, target in alias_table.items():
            if self.endpoint(target) is None:
                raise SchemaConformanceError(f"alias {alias!r} targets unknown endpoint {target!r}")
            if self.endpoint(alias) is not None:
                raise SchemaConformanceError(f"alias {alias!r} collides with a canonical endpoint name")
        return replace(self, alias_table=MappingProxyType(dict(alias_table)))


def parse_schema(sdl_text: str) -> UnifiedSchema:
    """Parse SDL text into a UnifiedSchema.

    Raises GraphQLSyntaxError on malformed input, DuplicateDefinitionError
    on repeated type/field/endpoint names, and UnknownTypeReferenceError
    when a referenced type is never declared.
    """
    stream = TokenStream(tokenize(sdl_text))
    types: dict[str, list[FieldDef]] = {}
    endpoints: dict[str, EndpointDef] = {}
    endpoint_order: list[str] = []
    saw_query = False

    while stream.peek().kind != "eof":
        tok = stream.expect_name("'type' or 'extend'")
        extend = False
        if tok.value == "extend":
            extend = True
            tok = stream.expect_name("'type'")
        if tok.value != "type":
            raise GraphQLSyntaxError(f"unsupported definition {tok.value!r}", tok.line, tok.col)
        name_tok = stream.expect_name("type name")
        type_name = name_tok.value

        if type_name == "Query":
            if extend and not saw_query:
                raise GraphQLSyntaxError("extend type Query before Query is declared", name_tok.line, name_tok.col)
            if not extend and saw_query:
                raise DuplicateDefinitionError("type Query declared twice")
            saw_query = True
            for ep in _parse_endpoint_block(stream):
                if ep.name in endpoints:
                    raise DuplicateDefinitionError(f"endpoint {ep.name!r} declared twice")
                endpoints[ep.name] = ep
                endpoint_order.append(ep.name)
            continue

        if extend:
            if type_name not in types:
                raise UnknownTypeReferenceError(f"extend of undeclared type {type_name!r}")
        elif type_name in types:
            raise DuplicateDefinitionError(f"type {type_name!r} declared twice")
        fields = types.setdefault(type_name, [])
        for fdef in _parse_field_block(stream):
            if any(f.name == fdef.name for f in fields):
                raise DuplicateDefinitionError(f"field {fdef.name!r} declared twice on type {type_name!r}")
            fields.append(fdef)

    if not saw_query:
        raise GraphQLSyntaxError("missing Query type", 1, 1)

    type_defs = tuple(TypeDef(name, tuple(fields)) for name, fields in types.items())
    declared = {t.name for t in type_defs} | SCALARS
    for t in type_defs:
        for f in t.fields:
            if f.type.name not in declared:
                raise UnknownTypeReferenceError(f"field {t.name}.{f.name} references undeclared type {f.type.name!r}")
    endpoint_defs = []
    for name in endpoint_order:
        ep = endpoints[name]
        if ep.return_type.name not in declared:
            raise UnknownTypeReferenceError(f"endpoint {name!r} returns undeclared type {ep.return_type.name!r}")
        for a in ep.args:
            if a.type.name not in SCALARS:
                raise UnknownTypeReferenceError(f"argument {name}.{a.name} must be a scalar, got {a.type.name!r}")
        endpoint_defs.append(replace(ep, source_vendor=ENDPOINT_VENDORS.get(name, "")))

    return UnifiedSchema(types=type_defs, endpoints=tuple(endpoint_defs))


def _parse_type_ref(stream: TokenStream) -> TypeRef:
    if stream.accept_punct("["):
        inner = stream.expect_name("type name").value
        inner_non_null = stream.accept_punct("!")
        stream.expect_punct("]")
        non_null = stream.accept_punct("!")
        return TypeRef(inner, is_list=True, non_null=non_null, inner_non_null=inner_non_null)
    name = stream.expect_name("type name").value
    non_null = stream.accept_punct("!")
    return TypeRef(name, non_null=non_null)


def _parse_field_block(stream: TokenStream) -> list[FieldDef]:
    stream.expect_punct("{")
    fields: list[FieldDef] = []
    while not stream.accept_punct("}"):
        name = stream.expect_name("field name").value
        stream.expect_punct(":")
        fields.append(FieldDef(name, _parse_type_ref(stream)))
    if not fields:
        tok = stream.peek()
        raise GraphQLSyntaxError("empty type body", tok.line, tok.col)
    return fields


def _parse_endpoint_block(stream: TokenStream) -> list[EndpointDef]:
    stream.expect_punct("{")
    endpoints: list[EndpointDef] = []
    while not stream.accept_punct("}"):
        name_tok = stream.expect_name("endpoint name")
        args: list[ArgDef] = []
        if stream.accept_punct("("):
            while not stream.accept_punct(")"):
                arg_name = stream.expect_name("argument name").value
                stream.expect_punct(":")
                arg_type = _parse_type_ref(stream)
                if any(_arg_key(a.name) == _arg_key(arg_name) for a in args):
                    raise DuplicateDefinitionError(f"argument {arg_name!r} declared twice on {name_tok.value!r}")
                args.append(ArgDef(arg_name, arg_type))
        stream.expect_punct(":")
        ret = _parse_type_ref(stream)
        endpoints.append(EndpointDef(name_tok.value, tuple(args), ret))
    if not endpoints:
        tok = stream.peek()
        raise GraphQLSyntaxError("empty Query body", tok.line, tok.col)
    return endpoints


def check_unified(schema: UnifiedSchema) -> None:
    """Assert that a schema exposes exactly the six canonical endpoints."""
    names = {e.name for e in schema.endpoints}
    if names != set(CANONICAL_ENDPOINTS):
        missing = sorted(CANONICAL_ENDPOINTS - names)
        extra = sorted(names - CANONICAL_ENDPOINTS)
        raise SchemaConformanceError(f"not the unified schema: missing={missing} extra={extra}")


def load_unified(schema_path: str | Path, aliases_path: str | Path | None = None) -> UnifiedSchema:
    """Load the shipped unified schema plus its alias table from disk."""
    sdl = Path(schema_path).read_text(encoding="utf-8")
    schema = parse_schema(sdl)
    check_unified(schema)
    if aliases_path is not None:
        raw = json.loads(Path(aliases_path).read_text(encoding="utf-8"))
        if not isinstance(raw, dict) or not all(isinstance(k, str) and isinstance(v, str) for k, v in raw.items()):
            raise SchemaConformanceError("alias table must be a JSON object of string -> string")
        schema = schema.with_aliases(raw)
    return schema
