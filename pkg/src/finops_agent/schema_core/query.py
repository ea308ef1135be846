"""Query parsing and rendering.

Accepted operations are plain queries: named or anonymous, with field
selections, scalar arguments, aliases, and nested selection sets.
Fragments, mutations, subscriptions, variables, and directives are
rejected with UnsupportedConstructError.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from finops_agent.errors import FinopsError
from finops_agent.schema_core.lexer import GraphQLSyntaxError, TokenStream, tokenize

Scalar = str | int | float | bool


class UnsupportedConstructError(FinopsError):
    """The query uses a GraphQL construct outside the supported subset."""


@dataclass(frozen=True)
class Argument:
    name: str
    value: Scalar


@dataclass(frozen=True)
class FieldSelection:
    name: str
    alias: str | None = None
    arguments: tuple[Argument, ...] = ()
    selections: tuple["FieldSelection", ...] = ()

    @property
    def response_key(self) -> str:
        return self.alias or self.name


@dataclass(frozen=True)
class QueryDocument:
    operation_name: str | None
    selections: tuple[FieldSelection, ...] = ()


def parse_query(query_text: str) -> QueryDocument:
    """Parse a single query operation into a QueryDocument."""
    stream = TokenStream(tokenize(query_text))
    tok = stream.peek()
    operation_name = None

    if tok.kind == "name":
        if tok.value in ("mutation", "subscription", "fragment"):
            raise UnsupportedConstructError(f"{tok.value} operations are not supported")
        if tok.value != "query":
            raise GraphQLSyntaxError(f"expected 'query' or a selection set, found {tok.value!r}", tok.line, tok.col)
        stream.next()
        tok = stream.peek()
        if tok.kind == "name":
            operation_name = stream.next().value
        if stream.peek().kind == "punct" and stream.peek().value == "(":
            raise UnsupportedConstructError("variable definitions are not supported")
    elif not (tok.kind == "punct" and tok.value == "{"):
        raise GraphQLSyntaxError("expected a query operation", tok.line, tok.col)

    selections = _parse_selection_set(stream)
    end = stream.peek()
    if end.kind != "eof":
        raise GraphQLSyntaxError("only a single operation is supported", end.line, end.col)
    return QueryDocument(operation_name=operation_name, selections=selections)


def _parse_selection_set(stream: TokenStream) -> tuple[FieldSelection, ...]:
    stream.expect_punct("{")
    selections: list[FieldSelection] = []
    while not stream.accept_punct("}"):
        tok = stream.peek()
        if tok.kind == "spread":
            raise UnsupportedConstructError("fragments are not supported")
        selections.append(_parse_field(stream))
    if not selections:
        tok = stream.peek()
        raise GraphQLSyntaxError("empty selection set", tok.line, tok.col)
    return tuple(selections)


def _parse_field(stream: TokenStream) -> FieldSelection:
    first = stream.expect_name("field name")
    alias = None
    name = first.value
    if stream.accept_punct(":"):
        alias = first.value
        name = stream.expect_name("field name").value

    arguments: list[Argument] = []
    if stream.accept_punct("("):
        while not stream.accept_punct(")"):
            arg_name = stream.expect_name("argument name").value
            stream.expect_punct(":")
            arguments.append(Argument(arg_name, _parse_value(stream)))

    tok = stream.peek()
    if tok.kind == "punct" and tok.value == "@":
        raise UnsupportedConstructError("directives are not supported")

    children: tuple[FieldSelection, ...] = ()
    if tok.kind == "punct" and tok.value == "{":
        children = _parse_selection_set(stream)
    return FieldSelection(name=name, alias=alias, arguments=tuple(arguments), selections=children)


def _parse_value(stream: TokenStream) -> Scalar:
    tok = stream.next()
    if tok.kind == "string":
        return tok.value
    if tok.kind == "int":
        return int(tok.value)
    if tok.kind == "float":
        return float(tok.value)
    if tok.kind == "name":
        if tok.value == "true":
            return True
        if tok.value == "false":
            return False
        raise GraphQLSyntaxError(f"unsupported literal {tok.value!r}", tok.line, tok.col)
    if tok.kind == "punct" and tok.value == "$":
        raise UnsupportedConstructError("variables are not supported")
    raise GraphQLSyntaxError(f"expected a scalar literal, found {tok.value or tok.kind!r}", tok.line, tok.col)


def render_query(doc: QueryDocument) -> str:
    """Render a document back to query text; parse(render(doc)) is structurally equal to doc."""
    head = f"query {doc.operation_name} " if doc.operation_name else "query "
    return head + _render_set(doc.selections, 0)


def _render_set(selections: tuple[FieldSelection, ...], depth: int) -> str:
    pad = "  " * (depth + 1)
    lines = ["{"]
    for sel in selections:
        lines.append(pad + _render_field(sel, depth + 1))
    lines.append("  " * depth + "}")
    return "\n".join(lines)


def _render_field(sel: FieldSelection, depth: int) -> str:
    out = f"{sel.alias}: {sel.name}" if sel.alias else sel.name
    if sel.arguments:
        args = ", ".join(f"{a.name}: {_render_value(a.value)}" for a in sel.arguments)
        out += f"({args})"
    if sel.selections:
        out += " " + _render_set(sel.selections, depth)
    return out


def _render_value(value: Scalar) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, str):
        return json.dumps(value)
    return repr(value)
