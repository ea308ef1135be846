"""Pluggable chat-completion backends: HTTP client and deterministic scripts."""

from finops_agent.llm.base import (
    AuthError,
    ChatMessage,
    CompletionParams,
    LlmBackend,
    LlmUnavailableError,
    last_user_content,
)
from finops_agent.llm.http import HttpChatBackend
from finops_agent.llm.scripted import (
    Script,
    ScriptConcurrencyError,
    ScriptedBackend,
    ScriptEntry,
    ScriptExhaustedError,
    ScriptMismatchError,
    ScriptSchemaError,
    load_script,
)

__all__ = [
    "AuthError",
    "ChatMessage",
    "CompletionParams",
    "HttpChatBackend",
    "LlmBackend",
    "LlmUnavailableError",
    "Script",
    "ScriptConcurrencyError",
    "ScriptEntry",
    "ScriptExhaustedError",
    "ScriptMismatchError",
    "ScriptSchemaError",
    "ScriptedBackend",
    "last_user_content",
    "load_script",
]
