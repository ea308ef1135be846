"""Natural language to GraphQL translation."""

from finops_agent.nl2graphql.exemplars import (
    Exemplar,
    ExemplarBankError,
    load_bank,
    score_exemplar,
    select_exemplars,
)
from finops_agent.nl2graphql.filtering import (
    STOPWORDS,
    SchemaSubset,
    endpoint_keywords,
    filter_schema,
    overlap_score,
    tokenize_text,
)
from finops_agent.nl2graphql.prompts import (
    MAX_PROMPT_BYTES,
    PromptBundle,
    PromptOverflowError,
    build_prompt,
)
from finops_agent.nl2graphql.translate import (
    DEFAULT_EXEMPLAR_COUNT,
    DEFAULT_MAX_ATTEMPTS,
    TranslationAttempt,
    TranslationError,
    TranslationExhaustedError,
    TranslationResult,
    extract_query,
    translate,
)

__all__ = [
    "DEFAULT_EXEMPLAR_COUNT",
    "DEFAULT_MAX_ATTEMPTS",
    "Exemplar",
    "ExemplarBankError",
    "MAX_PROMPT_BYTES",
    "PromptBundle",
    "PromptOverflowError",
    "STOPWORDS",
    "SchemaSubset",
    "TranslationAttempt",
    "TranslationError",
    "TranslationExhaustedError",
    "TranslationResult",
    "build_prompt",
    "endpoint_keywords",
    "extract_query",
    "filter_schema",
    "load_bank",
    "overlap_score",
    "score_exemplar",
    "select_exemplars",
    "tokenize_text",
    "translate",
]
