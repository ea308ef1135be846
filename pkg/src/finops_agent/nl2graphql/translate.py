"""Natural language to GraphQL translation with validation-driven retries.

The loop: build a prompt, ask the model for a query, parse and validate the
reply. Invalid attempts feed their error text back into the next prompt so the
model can self-correct. Attempts are capped; exhausting them is an error that
carries the full attempt history.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from finops_agent.errors import FinopsError
from finops_agent.llm.base import CompletionParams, LlmBackend
from finops_agent.nl2graphql.exemplars import Exemplar, select_exemplars
from finops_agent.nl2graphql.filtering import filter_schema
from finops_agent.nl2graphql.prompts import PromptBundle, build_prompt
from finops_agent.schema_core import (
    GraphQLSyntaxError,
    QueryDocument,
    UnifiedSchema,
    UnsupportedConstructError,
    parse_query,
    validate_query,
)

DEFAULT_MAX_ATTEMPTS = 3
DEFAULT_EXEMPLAR_COUNT = 3

_FENCE_RE = re.compile(r"```(?:[a-zA-Z0-9_-]*)\n(.*?)```", re.DOTALL)


class TranslationError(FinopsError):
    pass


@dataclass(frozen=True)
class TranslationAttempt:
    """One generate/validate round."""

    raw_response: str
    query_text: str
    errors: tuple[str, ...]

    @property
    def ok(self) -> bool:
        return not self.errors


@dataclass(frozen=True)
class TranslationResult:
    final_query: QueryDocument
    final_text: str
    attempts: tuple[TranslationAttempt, ...]

    @property
    def attempts_used(self) -> int:
        return len(self.attempts)


@dataclass
class TranslationExhaustedError(TranslationError):
    """Every attempt produced an invalid query."""

    attempts: tuple[TranslationAttempt, ...] = field(default_factory=tuple)

    def __str__(self) -> str:
        n = len(self.attempts)
        last = "; ".join(self.attempts[-1].errors) if self.attempts else "no attempts"
        return f"translation failed after {n} attempts; last errors: {last}"


def extract_query(response: str) -> str:
    """Pull the query text out of a model reply.

    The first fenced code block wins regardless of its language tag. A reply
    with no fence is treated as bare query text.
    """
    m = _FENCE_RE.search(response)
    if m:
        return m.group(1).strip()
    return response.strip()


def _attempt_errors(schema: UnifiedSchema, text: str) -> tuple[QueryDocument | None, tuple[str, ...]]:
    try:
        doc = parse_query(text)
    except (GraphQLSyntaxError, UnsupportedConstructError) as exc:
        return None, (str(exc),)
    report = validate_query(doc, schema)
    if report.valid:
        return doc, ()
    return doc, tuple(f"{issue.code} at {issue.path}: {issue.message}" for issue in report.errors)


def translate(
    nl_request: str,
    schema: UnifiedSchema,
    backend: LlmBackend,
    bank: list[Exemplar] | None = None,
    max_attempts: int = DEFAULT_MAX_ATTEMPTS,
    exemplar_count: int = DEFAULT_EXEMPLAR_COUNT,
    params: CompletionParams | None = None,
) -> TranslationResult:
    """Translate a natural language request into a validated query."""
    if max_attempts < 1:
        raise TranslationError(f"max_attempts must be >= 1, got {max_attempts}")
    subset = filter_schema(nl_request, schema)
    exemplars: list[Exemplar] = []
    if bank:
        k = min(exemplar_count, len(bank))
        exemplars = select_exemplars(nl_request, bank, k, schema)
    bundle: PromptBundle = build_prompt(nl_request, subset, exemplars)
    params = params or CompletionParams()

    attempts: list[TranslationAttempt] = []
    feedback: str | None = None
    for _ in range(max_attempts):
        response = backend.complete(bundle.messages(feedback), params)
        text = extract_query(response)
        doc, errors = _attempt_errors(schema, text)
        attempts.append(TranslationAttempt(raw_response=response, query_text=text, errors=errors))
        if doc is not None and not errors:
            return TranslationResult(final_query=doc, final_text=text, attempts=tuple(attempts))
        feedback = "\n".join(errors)
    raise TranslationExhaustedError(attempts=tuple(attempts))
