"""Prompt assembly for query generation."""

from __future__ import annotations

from dataclasses import dataclass

from finops_agent.errors import FinopsError
from finops_agent.llm.base import ChatMessage
from finops_agent.nl2graphql.exemplars import Exemplar
from finops_agent.nl2graphql.filtering import SchemaSubset

MAX_PROMPT_BYTES = 16 * 1024

_SYSTEM_RULES = """\
You translate FinOps requests into a single GraphQL query.
Rules:
- Use only the endpoints and fields listed below; invent nothing.
- Select only the fields the request needs.
- String argument values are double quoted.
- Reply with one query inside a ```graphql fenced block.

Available endpoints:
"""


class PromptOverflowError(FinopsError):
    """The prompt cannot be brought under the size budget."""


@dataclass(frozen=True)
class PromptBundle:
    system_section: str
    few_shot_section: str
    user_section: str
    exemplars_used: int

    def total_bytes(self) -> int:
        return len((self.system_section + self.few_shot_section + self.user_section).encode("utf-8"))

    def messages(self, feedback: str | None = None) -> list[ChatMessage]:
        user = self.few_shot_section + self.user_section
        if feedback:
            user += f"\n\nYour previous query was rejected. Validation errors:\n{feedback}\nGenerate a corrected query."
        return [ChatMessage("system", self.system_section), ChatMessage("user", user)]


def _render(nl_request: str, subset: SchemaSubset, exemplars: list[Exemplar]) -> PromptBundle:
    system = _SYSTEM_RULES + subset.digest_fragment + "\n"
    if exemplars:
        shots = []
        for ex in exemplars:
            shots.append(f"Request: {ex.nl_text}\nQuery:\n```graphql\n{ex.query_text}\n```")
        few_shot = "Examples:\n\n" + "\n\n".join(shots) + "\n\n"
    else:
        few_shot = ""
    user = f"Request: {nl_request}\nQuery:"
    return PromptBundle(
        system_section=system, few_shot_section=few_shot, user_section=user, exemplars_used=len(exemplars)
    )


def build_prompt(nl_request: str, subset: SchemaSubset, exemplars: list[Exemplar]) -> PromptBundle:
    """Assemble the prompt, dropping trailing exemplars until it fits the budget."""
    kept = list(exemplars)
    while True:
        bundle = _render(nl_request, subset, kept)
        if bundle.total_bytes() <= MAX_PROMPT_BYTES:
            return bundle
        if not kept:
            raise PromptOverflowError(
                f"prompt is {bundle.total_bytes()} bytes with no exemplars; budget is {MAX_PROMPT_BYTES}"
            )
        kept.pop()
