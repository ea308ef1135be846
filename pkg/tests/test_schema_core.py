"""Schema core: SDL parsing, query parsing, validation, digest, aliases."""

from __future__ import annotations

import re

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from finops_agent.schema_core import (
    CANONICAL_ENDPOINTS,
    Argument,
    DuplicateDefinitionError,
    FieldSelection,
    GraphQLSyntaxError,
    QueryDocument,
    SchemaConformanceError,
    UnknownTypeReferenceError,
    UnsupportedConstructError,
    introspect,
    parse_query,
    parse_schema,
    render_query,
    validate_query,
)
from finops_agent.schema_core.digest import TOOL_DESCRIPTIONS

EXPECTED_TYPES = {
    "Entity",
    "Action",
    "SpendingAnomaly",
    "CommitmentRecommendation",
    "RightsizingRecommendation",
}


class TestSdlParsing:
    def test_unified_schema_counts(self, sdl_text):
        schema = parse_schema(sdl_text)
        assert len(schema.endpoints) == 6
        assert len(schema.types) == 5

    def test_unified_schema_names(self, sdl_text):
        schema = parse_schema(sdl_text)
        assert {e.name for e in schema.endpoints} == set(CANONICAL_ENDPOINTS)
        assert {t.name for t in schema.types} == EXPECTED_TYPES

    def test_type_counts_match_sdl_text_oracle(self, sdl_text):
        # Independent count: object type headers in the raw SDL, Query excluded.
        headers = re.findall(r"(?:^|\n)\s*(?:extend\s+)?type\s+(\w+)", sdl_text)
        assert len(EXPECTED_TYPES) == len({h for h in headers if h != "Query"})
        # And endpoint count: field names declared inside Query blocks.
        assert sdl_text.count("get_") >= 6

    def test_entity_field_types(self, schema):
        entity = schema.type_def("Entity")
        by_name = {f.name: f.type for f in entity.fields}
        assert by_name["id"].name == "Int" and by_name["id"].non_null
        assert by_name["name"].name == "String" and by_name["name"].non_null
        assert by_name["description"].name == "String" and not by_name["description"].non_null
        assert by_name["cost"].name == "Float"
        assert by_name["user_id"].name == "String" and by_name["user_id"].non_null

    def test_endpoint_signatures(self, schema):
        entities = schema.endpoint("get_entities")
        assert [a.name for a in entities.args] == ["application_name"]
        assert entities.args[0].required
        assert entities.return_type.is_list and entities.return_type.name == "Entity"

        actions = schema.endpoint("get_actions")
        assert {a.name for a in actions.args} == {"entity_name", "app_name"}
        assert not any(a.required for a in actions.args)

        apps = schema.endpoint("get_applications_names")
        assert apps.args == ()
        assert apps.return_type.is_list and apps.return_type.name == "String"

        commits = schema.endpoint("get_commitment_recommendations")
        assert commits.args == ()

    def test_endpoint_vendor_split(self, schema):
        vendors = {e.name: e.source_vendor for e in schema.endpoints}
        assert vendors["get_actions"] == "turbonomic"
        assert vendors["get_spending_anomaly_events"] == "apptio"
        assert sorted(set(vendors.values())) == ["apptio", "turbonomic"]

    def test_duplicate_type_rejected(self):
        sdl = "type A { x: Int }\ntype A { y: Int }\ntype Query { q: A }"
        with pytest.raises(DuplicateDefinitionError):
            parse_schema(sdl)

    def test_duplicate_endpoint_rejected(self):
        sdl = "type Query { q: Int }\nextend type Query { q: Int }"
        with pytest.raises(DuplicateDefinitionError):
            parse_schema(sdl)

    def test_duplicate_field_rejected(self):
        sdl = "type A { x: Int x: Int }\ntype Query { q: A }"
        with pytest.raises(DuplicateDefinitionError):
            parse_schema(sdl)

    def test_unknown_type_reference_rejected(self):
        sdl = "type Query { q: [Ghost] }"
        with pytest.raises(UnknownTypeReferenceError):
            parse_schema(sdl)

    def test_extend_before_declaration_rejected(self):
        sdl = "extend type Query { q: Int }"
        with pytest.raises(GraphQLSyntaxError):
            parse_schema(sdl)

    def test_syntax_error_carries_position(self):
        with pytest.raises(GraphQLSyntaxError) as err:
            parse_schema("type Query {\n  q Int\n}")
        assert err.value.line == 2
        assert "(line 2, col" in str(err.value)


class TestAliases:
    def test_alias_resolution(self, schema):
        got = schema.resolve_endpoint("turbonomicGetActions")
        assert got is not None and got[0] == "get_actions"
        got = schema.resolve_endpoint("apptioGetSpendingAnomalyEvents")
        assert got is not None and got[0] == "get_spending_anomaly_events"

    def test_canonical_names_resolve_to_themselves(self, schema):
        for name in CANONICAL_ENDPOINTS:
            assert schema.resolve_endpoint(name)[0] == name

    def test_endpoint_names_match_exactly(self, schema):
        assert schema.resolve_endpoint("GET_ACTIONS") is None
        assert schema.resolve_endpoint("getActions") is None

    def test_without_alias_table(self, bare_schema):
        assert bare_schema.resolve_endpoint("turbonomicGetActions") is None

    def test_alias_to_unknown_target_rejected(self, bare_schema):
        with pytest.raises(SchemaConformanceError):
            bare_schema.with_aliases({"x": "not_an_endpoint"})

    def test_alias_colliding_with_canonical_rejected(self, bare_schema):
        with pytest.raises(SchemaConformanceError):
            bare_schema.with_aliases({"get_actions": "get_entities"})

    def test_arg_names_fold_case_and_underscores(self, schema):
        endpoint = schema.endpoint("get_spending_anomaly_events")
        for spelling in ("app_name", "appName", "APP_NAME", "appname"):
            found = schema.find_arg(endpoint, spelling)
            assert found is not None and found.name == "app_name"
        assert schema.find_arg(endpoint, "application") is None


class TestQueryParsing:
    def test_fields_args_aliases_nesting(self):
        doc = parse_query(
            'query Q { latest: get_entities(application_name: "App") { id name } }'
        )
        assert doc.operation_name == "Q"
        sel = doc.selections[0]
        assert sel.alias == "latest" and sel.name == "get_entities"
        assert sel.response_key == "latest"
        assert sel.arguments == (Argument("application_name", "App"),)
        assert [c.name for c in sel.selections] == ["id", "name"]

    def test_anonymous_shorthand(self):
        doc = parse_query("{ get_applications_names }")
        assert doc.operation_name is None
        assert doc.selections[0].name == "get_applications_names"

    def test_scalar_argument_literals(self):
        doc = parse_query('{ f(a: 1, b: -2.5, c: true, d: false, e: "s") }')
        values = {a.name: a.value for a in doc.selections[0].arguments}
        assert values == {"a": 1, "b": -2.5, "c": True, "d": False, "e": "s"}
        assert isinstance(values["a"], int) and isinstance(values["b"], float)

    @pytest.mark.parametrize(
        "text,needle",
        [
            ("mutation { change }", "mutation"),
            ("subscription { watch }", "subscription"),
            ("fragment F on T { id }", "fragment"),
            ("query ($x: String) { f(a: $x) }", "variable definitions"),
            ("query { f(a: $x) }", "variables"),
            ("query { f @skip }", "directives"),
            ("query { ...F }", "fragments"),
        ],
    )
    def test_unsupported_constructs(self, text, needle):
        with pytest.raises(UnsupportedConstructError) as err:
            parse_query(text)
        assert needle in str(err.value)

    @pytest.mark.parametrize(
        "text",
        [
            "query {",
            "query { }",
            "query { f(a) }",
            "query { f } query { g }",
            "notaquery { f }",
            "query { f(a: null) }",
        ],
    )
    def test_syntax_errors(self, text):
        with pytest.raises(GraphQLSyntaxError):
            parse_query(text)

    def test_error_position_is_one_based(self):
        with pytest.raises(GraphQLSyntaxError) as err:
            parse_query("query {\n  f(a)\n}")
        assert err.value.line == 2 and err.value.col >= 1


_NAMES = st.from_regex(r"[a-z][a-z0-9_]{0,8}", fullmatch=True).filter(
    lambda s: s not in ("true", "false", "query", "on")
)
_SCALARS = st.one_of(
    st.integers(min_value=-(10**9), max_value=10**9),
    st.floats(min_value=-1e6, max_value=1e6, allow_nan=False, allow_infinity=False).filter(
        lambda f: f == float(repr(f))
    ),
    st.booleans(),
    st.text(st.characters(codec="utf-8", exclude_categories=("Cs",)), max_size=12),
)


def _selection_strategy(depth: int):
    args = st.lists(
        st.builds(Argument, name=_NAMES, value=_SCALARS), max_size=2, unique_by=lambda a: a.name
    )
    children = (
        st.just(())
        if depth == 0
        else st.one_of(
            st.just(()),
            st.lists(_selection_strategy(depth - 1), min_size=1, max_size=3).map(tuple),
        )
    )
    return st.builds(
        FieldSelection,
        name=_NAMES,
        alias=st.one_of(st.none(), _NAMES),
        arguments=args.map(tuple),
        selections=children,
    )


_DOCUMENTS = st.builds(
    QueryDocument,
    operation_name=st.one_of(st.none(), st.from_regex(r"[A-Z][A-Za-z0-9]{0,8}", fullmatch=True)),
    selections=st.lists(_selection_strategy(2), min_size=1, max_size=3).map(tuple),
)


class TestRenderRoundTrip:
    @settings(max_examples=150, deadline=None)
    @given(_DOCUMENTS)
    def test_parse_render_round_trip(self, doc):
        assert parse_query(render_query(doc)) == doc


class TestValidation:
    def test_valid_query(self, schema):
        doc = parse_query('{ get_entities(application_name: "App") { id name } }')
        report = validate_query(doc, schema)
        assert report.valid and report.errors == ()

    def test_unknown_endpoint(self, schema):
        report = validate_query(parse_query("{ get_nothing }"), schema)
        assert not report.valid
        assert [e.code for e in report.errors] == ["UnknownEndpoint"]

    def test_unknown_field_with_dotted_path(self, schema):
        doc = parse_query('{ get_entities(application_name: "A") { id ghost } }')
        report = validate_query(doc, schema)
        codes = {(e.code, e.path) for e in report.errors}
        assert ("UnknownField", "get_entities.ghost") in codes

    def test_unknown_argument(self, schema):
        doc = parse_query('{ get_entities(application_name: "A", color: "red") { id } }')
        report = validate_query(doc, schema)
        assert any(e.code == "UnknownArgument" for e in report.errors)

    def test_missing_required_argument(self, schema):
        report = validate_query(parse_query("{ get_entities { id } }"), schema)
        assert any(e.code == "MissingArgument" for e in report.errors)

    def test_argument_type_mismatch(self, schema):
        doc = parse_query("{ get_entities(application_name: 3) { id } }")
        report = validate_query(doc, schema)
        assert any(e.code == "ArgumentTypeMismatch" for e in report.errors)

    def test_int_widens_to_float_argument(self):
        tiny = parse_schema("type Query { probe(level: Float): Int }")
        assert validate_query(parse_query("{ probe(level: 2) }"), tiny).valid
        report = validate_query(parse_query("{ probe(level: true) }"), tiny)
        assert any(e.code == "ArgumentTypeMismatch" for e in report.errors)

    def test_object_needs_selection_set(self, schema):
        report = validate_query(parse_query('{ get_entities(application_name: "A") }'), schema)
        assert any(e.code == "MissingSubselection" for e in report.errors)

    def test_scalar_rejects_selection_set(self, schema):
        report = validate_query(parse_query("{ get_applications_names { x } }"), schema)
        assert any(e.code == "SelectionOnScalar" for e in report.errors)

    def test_scalar_field_rejects_subselection(self, schema):
        doc = parse_query('{ get_entities(application_name: "A") { id { x } } }')
        report = validate_query(doc, schema)
        assert any(e.code == "SelectionOnScalar" for e in report.errors)

    def test_resolved_aliases_reported(self, schema):
        doc = parse_query('{ turbonomicGetActions(appName: "A") { id } }')
        report = validate_query(doc, schema)
        assert report.valid
        assert report.resolved_aliases == {"turbonomicGetActions": "get_actions"}

    def test_camel_case_argument_accepted(self, schema):
        doc = parse_query('{ get_spending_anomaly_events(appName: "A") { id } }')
        assert validate_query(doc, schema).valid

    def test_errors_never_raise(self, schema):
        doc = parse_query("{ a b c { d { e } } }")
        report = validate_query(doc, schema)
        assert not report.valid and len(report.errors) == 3


class TestDigest:
    def test_one_entry_per_endpoint_sorted(self, schema):
        digest = introspect(schema)
        names = [e.name for e in digest.entries]
        assert names == sorted(CANONICAL_ENDPOINTS)

    def test_descriptions_and_signatures(self, schema):
        digest = introspect(schema)
        for entry in digest.entries:
            assert entry.description == TOOL_DESCRIPTIONS[entry.name]
            assert entry.name in entry.signature
            assert entry.render().startswith(entry.signature)

    def test_return_fields_match_types(self, schema):
        digest = introspect(schema)
        actions = digest.entry("get_actions")
        assert actions.return_fields == tuple(
            f.name for f in schema.type_def("Action").fields
        )
        apps = digest.entry("get_applications_names")
        assert apps.return_fields == ("String",)

    def test_digest_is_deterministic_and_bounded(self, schema):
        a = introspect(schema).render()
        b = introspect(schema).render()
        assert a == b
        assert len(a.encode("utf-8")) <= 4096


def _mutate_tokens(sdl: str, rng) -> str:
    """Corrupt one token-ish span: delete, duplicate, or swap a word/punct."""
    tokens = re.findall(r"\w+|[^\w\s]", sdl)
    i = rng.randrange(len(tokens))
    op = rng.choice(("delete", "duplicate", "replace"))
    if op == "delete":
        del tokens[i]
    elif op == "duplicate":
        tokens.insert(i, tokens[i])
    else:
        tokens[i] = rng.choice(("Xx", "{", "}", ":", "!", "[", "]", "123", "type"))
    return " ".join(tokens)


class TestMutationResistance:
    def test_corruptions_never_silently_accepted(self, sdl_text):
        import random

        rng = random.Random(20260813)
        baseline = parse_schema(sdl_text)
        for _ in range(30):
            corrupted = _mutate_tokens(sdl_text, rng)
            try:
                mutated = parse_schema(corrupted)
            except Exception:
                continue  # rejection is a pass
            assert mutated != baseline, f"silently accepted: {corrupted[:120]}..."
