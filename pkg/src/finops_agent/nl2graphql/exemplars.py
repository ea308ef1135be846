"""Exemplar bank for few-shot query generation.

Every exemplar's query is parsed and validated against the unified
schema at load time, so a broken bank fails fast instead of teaching the
model invalid queries. Selection ranks by equal parts lexical similarity
(token Jaccard on the request text) and structural similarity (Jaccard
between the exemplar's endpoints and the filtered schema subset).
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

from finops_agent.errors import FinopsError
from finops_agent.nl2graphql.filtering import filter_schema, tokenize_text
from finops_agent.schema_core.query import parse_query
from finops_agent.schema_core.sdl import UnifiedSchema
from finops_agent.schema_core.validate import validate_query


class ExemplarBankError(FinopsError):
    """The exemplar bank file is malformed or contains invalid queries."""


@dataclass(frozen=True)
class Exemplar:
    nl_text: str
    query_text: str
    endpoints_used: frozenset[str]


def load_bank(path: str | Path, schema: UnifiedSchema) -> list[Exemplar]:
    """Load [{nl, query}] entries; endpoints_used is derived by parsing each query."""
    raw = json.loads(Path(path).read_text(encoding="utf-8"))
    if not isinstance(raw, list):
        raise ExemplarBankError("bank file must be a JSON array")
    bank = []
    for i, item in enumerate(raw):
        if not isinstance(item, dict) or not isinstance(item.get("nl"), str) or not isinstance(item.get("query"), str):
            raise ExemplarBankError(f"entry {i}: expected an object with string 'nl' and 'query'")
        try:
            doc = parse_query(item["query"])
        except FinopsError as exc:
            raise ExemplarBankError(f"entry {i}: query does not parse: {exc}") from None
        report = validate_query(doc, schema)
        if not report.valid:
            first = report.errors[0]
            raise ExemplarBankError(f"entry {i}: query invalid: {first.code} at {first.path}")
        endpoints = frozenset(
            schema.resolve_endpoint(sel.name)[0] for sel in doc.selections
        )
        bank.append(Exemplar(nl_text=item["nl"], query_text=item["query"], endpoints_used=endpoints))
    return bank


def _jaccard(a: frozenset, b: frozenset) -> float:
    if not a and not b:
        return 0.0
    return len(a & b) / len(a | b)


def score_exemplar(nl_request: str, request_endpoints: frozenset[str], exemplar: Exemplar) -> float:
    lexical = _jaccard(tokenize_text(nl_request), tokenize_text(exemplar.nl_text))
    structural = _jaccard(request_endpoints, exemplar.endpoints_used)
    return 0.5 * lexical + 0.5 * structural


def select_exemplars(
    nl_request: str, bank: list[Exemplar], k: int, schema: UnifiedSchema
) -> list[Exemplar]:
    """Top-k exemplars by similarity; ties keep bank order."""
    if k < 1:
        raise ValueError("k must be >= 1")
    if not bank:
        raise ValueError("exemplar bank is empty")
    request_endpoints = frozenset(filter_schema(nl_request, schema).endpoints)
    scored = [(score_exemplar(nl_request, request_endpoints, ex), i, ex) for i, ex in enumerate(bank)]
    scored.sort(key=lambda t: (-t[0], t[1]))
    return [ex for _, _, ex in scored[:k]]
