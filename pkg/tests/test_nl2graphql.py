"""NL-to-GraphQL: filtering, exemplars, prompts, and self-correcting translation."""

from __future__ import annotations

import json

import pytest

from finops_agent.assets import script_path
from finops_agent.llm import ChatMessage, CompletionParams, ScriptedBackend
from finops_agent.nl2graphql import (
    MAX_PROMPT_BYTES,
    Exemplar,
    ExemplarBankError,
    PromptOverflowError,
    TranslationError,
    TranslationExhaustedError,
    build_prompt,
    extract_query,
    filter_schema,
    load_bank,
    select_exemplars,
    tokenize_text,
    translate,
)
from finops_agent.nl2graphql.filtering import endpoint_keywords, overlap_score
from finops_agent.schema_core import render_query, validate_query

ANOMALY_REQUEST = "List spending anomaly events for OnlineBoutique with their severity."


class TestFiltering:
    def test_tokenizer_drops_stopwords(self):
        assert tokenize_text("The cost of the anomalies") == {"cost", "anomalies"}

    def test_anomaly_request_keeps_anomaly_endpoint(self, schema):
        subset = filter_schema("show me spending anomaly events", schema)
        assert "get_spending_anomaly_events" in subset.endpoints
        assert "get_spending_anomaly_events" in subset.digest_fragment

    def test_unrelated_request_falls_back_to_everything(self, schema):
        subset = filter_schema("zzz qqq xyzzy", schema)
        assert len(subset.endpoints) == 6

    def test_subset_is_sorted_and_scored(self, schema):
        request = "rightsizing savings for the checkout application"
        subset = filter_schema(request, schema)
        assert list(subset.endpoints) == sorted(subset.endpoints)
        bags = endpoint_keywords(schema)
        tokens = tokenize_text(request)
        for name in subset.endpoints:
            assert overlap_score(tokens, bags[name]) > 0 or len(subset.endpoints) == 6


class TestExemplars:
    def test_bank_loads_and_derives_endpoints(self, schema, bank):
        assert len(bank) >= 6
        used = set().union(*(ex.endpoints_used for ex in bank))
        assert used == {
            "get_applications_names",
            "get_entities",
            "get_actions",
            "get_spending_anomaly_events",
            "get_commitment_recommendations",
            "get_rightsizing_recommendations",
        }

    def test_bank_rejects_invalid_query(self, schema, tmp_path):
        path = tmp_path / "bank.json"
        path.write_text(json.dumps([{"nl": "x", "query": "{ ghost }"}]), encoding="utf-8")
        with pytest.raises(ExemplarBankError):
            load_bank(path, schema)

    def test_bank_rejects_unparseable_query(self, schema, tmp_path):
        path = tmp_path / "bank.json"
        path.write_text(json.dumps([{"nl": "x", "query": "{ oops"}]), encoding="utf-8")
        with pytest.raises(ExemplarBankError):
            load_bank(path, schema)

    def test_selection_matches_scoring_oracle(self, schema, bank):
        # Oracle: recompute both Jaccard terms from scratch and rank with a
        # stable sort; selection must agree for several requests and sizes.
        def jaccard(a: frozenset, b: frozenset) -> float:
            return len(a & b) / len(a | b) if (a or b) else 0.0

        requests = [
            ANOMALY_REQUEST,
            "what entities belong to PaymentsCore",
            "review commitment coverage and rightsizing savings",
            "list all applications",
        ]
        for request in requests:
            subset = frozenset(filter_schema(request, schema).endpoints)
            scored = [
                (
                    -(0.5 * jaccard(tokenize_text(request), tokenize_text(ex.nl_text))
                      + 0.5 * jaccard(subset, ex.endpoints_used)),
                    i,
                )
                for i, ex in enumerate(bank)
            ]
            want_order = [bank[i] for _, i in sorted(scored)]
            for k in (1, 3, len(bank)):
                assert select_exemplars(request, bank, k, schema) == want_order[:k]

    def test_k_must_be_positive(self, schema, bank):
        with pytest.raises(ValueError):
            select_exemplars("x", bank, 0, schema)


class TestPrompts:
    def test_prompt_layout(self, schema, bank):
        subset = filter_schema(ANOMALY_REQUEST, schema)
        exemplars = select_exemplars(ANOMALY_REQUEST, bank, 2, schema)
        bundle = build_prompt(ANOMALY_REQUEST, subset, exemplars)
        assert bundle.system_section.rstrip().endswith(subset.digest_fragment)
        assert bundle.few_shot_section.startswith("Examples:")
        assert bundle.user_section == f"Request: {ANOMALY_REQUEST}\nQuery:"
        assert bundle.exemplars_used == 2
        assert bundle.total_bytes() <= MAX_PROMPT_BYTES

    def test_feedback_appended_to_retry_messages(self, schema, bank):
        subset = filter_schema(ANOMALY_REQUEST, schema)
        bundle = build_prompt(ANOMALY_REQUEST, subset, [])
        first = bundle.messages()
        retry = bundle.messages("UnknownField at x: nope")
        assert first[-1].content != retry[-1].content
        assert "Your previous query was rejected." in retry[-1].content
        assert "UnknownField at x: nope" in retry[-1].content

    def test_oversize_exemplars_dropped_from_the_tail(self, schema):
        subset = filter_schema("anything", schema)
        big = Exemplar(nl_text="pad " * 4000, query_text="{ get_applications_names }", endpoints_used=frozenset())
        keep = Exemplar(nl_text="small", query_text="{ get_applications_names }", endpoints_used=frozenset())
        bundle = build_prompt("request", subset, [keep, big])
        assert bundle.exemplars_used == 1
        assert "small" in bundle.few_shot_section

    def test_overflow_without_exemplars_raises(self, schema):
        subset = filter_schema("anything", schema)
        with pytest.raises(PromptOverflowError):
            build_prompt("x" * (MAX_PROMPT_BYTES + 1), subset, [])


class TestExtractQuery:
    def test_prefers_fenced_block(self):
        text = "Sure!\n```graphql\n{ get_applications_names }\n```\ntrailing prose"
        assert extract_query(text) == "{ get_applications_names }"

    def test_language_tag_is_irrelevant(self):
        assert extract_query("```\n{ x }\n```") == "{ x }"

    def test_bare_text_passes_through(self):
        assert extract_query("  { x }  ") == "{ x }"


class TestTranslate:
    def test_self_correction_second_attempt(self, schema, store, bank):
        backend = ScriptedBackend.from_file(script_path("bad_then_good"))
        result = translate(ANOMALY_REQUEST, schema, backend, bank=bank)
        assert result.attempts_used == 2
        assert not result.attempts[0].ok
        assert any("UnknownField" in e for e in result.attempts[0].errors)
        assert result.attempts[1].ok
        assert validate_query(result.final_query, schema).valid
        assert backend.consumed == 2

    def test_exhaustion_after_three_attempts(self, schema, bank):
        backend = ScriptedBackend.from_file(script_path("always_bad"))
        with pytest.raises(TranslationExhaustedError) as err:
            translate(ANOMALY_REQUEST, schema, backend, bank=bank, max_attempts=3)
        assert len(err.value.attempts) == 3
        assert all(not a.ok for a in err.value.attempts)
        assert "after 3 attempts" in str(err.value)

    def test_feedback_carries_error_detail(self, schema, bank):
        transcript: list[list[ChatMessage]] = []

        class Recording(ScriptedBackend):
            def complete(self, messages, params):
                transcript.append(list(messages))
                return super().complete(messages, params)

        backend = Recording.from_file(script_path("bad_then_good"))
        translate(ANOMALY_REQUEST, schema, backend, bank=bank)
        assert len(transcript) == 2
        retry_user = transcript[1][-1].content
        assert "UnknownField at get_spending_anomaly_events.severity" in retry_user
        assert "has no field 'severity'" in retry_user

    def test_max_attempts_must_be_positive(self, schema):
        backend = ScriptedBackend.from_file(script_path("always_bad"))
        with pytest.raises(TranslationError):
            translate("x", schema, backend, max_attempts=0)

    def test_translated_query_round_trips(self, schema, bank):
        backend = ScriptedBackend.from_file(script_path("bad_then_good"))
        result = translate(ANOMALY_REQUEST, schema, backend, bank=bank)
        from finops_agent.schema_core import parse_query

        assert parse_query(render_query(result.final_query)) == result.final_query

    def test_params_reach_the_backend(self, schema, bank):
        seen: list[CompletionParams] = []

        class Probe(ScriptedBackend):
            def complete(self, messages, params):
                seen.append(params)
                return super().complete(messages, params)

        backend = Probe.from_file(script_path("bad_then_good"))
        params = CompletionParams(temperature=0.25)
        translate(ANOMALY_REQUEST, schema, backend, bank=bank, params=params)
        assert all(p.temperature == 0.25 for p in seen)
