"""Chat-completion backend contract.

Callers depend only on complete(); concrete backends (HTTP or scripted)
are substitutable at wiring time.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Protocol

from finops_agent.errors import FinopsError


class LlmUnavailableError(FinopsError):
    """The backend could not produce a completion (after retries, if any)."""


class AuthError(FinopsError):
    """The endpoint rejected our credentials; retrying will not help."""


@dataclass(frozen=True)
class ChatMessage:
    role: str  # system | user | assistant | tool
    content: str

    def __post_init__(self):
        if self.role not in ("system", "user", "assistant", "tool"):
            raise ValueError(f"unknown role {self.role!r}")
        if self.role in ("system", "user") and not self.content:
            raise ValueError(f"{self.role} message must have content")


@dataclass(frozen=True)
class CompletionParams:
    temperature: float = 0.0
    max_tokens: int = 2048
    model_id: str = ""


class LlmBackend(Protocol):
    def complete(self, messages: list[ChatMessage], params: CompletionParams) -> str:
        """Return the assistant completion for a conversation."""
        ...


def last_user_content(messages: list[ChatMessage]) -> str:
    for msg in reversed(messages):
        if msg.role == "user":
            return msg.content
    return ""
