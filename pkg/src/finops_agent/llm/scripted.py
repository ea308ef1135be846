"""Deterministic scripted backend for tests and benchmark runs.

A Script is an ordered list of canned responses, consumed strictly in
order. An entry may pin a `match` substring that must appear in the last
user message; a mismatch is an error, never a silent skip, so a drifting
prompt fails loudly instead of desynchronizing the conversation.
"""

from __future__ import annotations

import json
import threading
from dataclasses import dataclass
from pathlib import Path

from finops_agent.errors import FinopsError
from finops_agent.llm.base import ChatMessage, CompletionParams, last_user_content


class ScriptMismatchError(FinopsError):
    """The next script entry's match substring is absent from the last user message."""


class ScriptExhaustedError(FinopsError):
    """complete() was called after every script entry was consumed."""


class ScriptConcurrencyError(FinopsError):
    """A scripted backend was invoked from two threads at once."""


class ScriptSchemaError(FinopsError):
    """The script file does not match the expected [{match?, response}] shape."""


@dataclass(frozen=True)
class ScriptEntry:
    response: str
    match: str | None = None


@dataclass(frozen=True)
class Script:
    entries: tuple[ScriptEntry, ...]


def load_script(path: str | Path) -> Script:
    """Load a JSON script file of [{match?, response}] entries, in file order."""
    raw = json.loads(Path(path).read_text(encoding="utf-8"))
    if not isinstance(raw, list):
        raise ScriptSchemaError("script file must be a JSON array")
    entries = []
    for i, item in enumerate(raw):
        if not isinstance(item, dict) or "response" not in item:
            raise ScriptSchemaError(f"entry {i}: expected an object with a 'response' field")
        response = item["response"]
        if not isinstance(response, str):
            raise ScriptSchemaError(f"entry {i}: 'response' must be a string")
        match = item.get("match")
        if match is not None and not isinstance(match, str):
            raise ScriptSchemaError(f"entry {i}: 'match' must be a string when present")
        entries.append(ScriptEntry(response=response, match=match))
    return Script(entries=tuple(entries))


class ScriptedBackend:
    """Single-consumer backend replaying a Script."""

    def __init__(self, script: Script, model_id: str = "scripted"):
        self.model_id = model_id
        self._entries = list(script.entries)
        self._cursor = 0
        self._lock = threading.Lock()

    @classmethod
    def from_file(cls, path: str | Path, model_id: str | None = None) -> "ScriptedBackend":
        return cls(load_script(path), model_id=model_id or Path(path).stem)

    @property
    def consumed(self) -> int:
        return self._cursor

    def complete(self, messages: list[ChatMessage], params: CompletionParams) -> str:
        if not self._lock.acquire(blocking=False):
            raise ScriptConcurrencyError("scripted backend used concurrently; it is single-consumer")
        try:
            if self._cursor >= len(self._entries):
                raise ScriptExhaustedError(f"script exhausted after {len(self._entries)} entries")
            entry = self._entries[self._cursor]
            if entry.match is not None and entry.match not in last_user_content(messages):
                raise ScriptMismatchError(
                    f"entry {self._cursor}: expected substring {entry.match!r} in the last user message"
                )
            self._cursor += 1
            return entry.response
        finally:
            self._lock.release()
