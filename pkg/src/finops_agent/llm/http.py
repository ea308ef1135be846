"""HTTP backend for chat-completion-compatible endpoints.

Speaks the de-facto chat completions wire shape: messages array in,
choices[0].message.content out. Transient failures are retried up to
three times with exponential backoff; auth failures are terminal.
"""

from __future__ import annotations

import os
import time
from typing import Callable

import httpx

from finops_agent.llm.base import AuthError, ChatMessage, CompletionParams, LlmUnavailableError

ENV_BASE_URL = "LLM_BASE_URL"
ENV_API_KEY = "LLM_API_KEY"
ENV_MODEL_ID = "LLM_MODEL_ID"

_MAX_RETRIES = 3
_BACKOFF_BASE_S = 0.5


class HttpChatBackend:
    def __init__(
        self,
        base_url: str,
        api_key: str = "",
        model_id: str = "",
        timeout: float = 60.0,
        sleep: Callable[[float], None] = time.sleep,
    ):
        self.base_url = base_url.rstrip("/")
        self.api_key = api_key
        self.model_id = model_id
        self._timeout = timeout
        self._sleep = sleep

    @classmethod
    def from_env(cls) -> "HttpChatBackend":
        base_url = os.environ.get(ENV_BASE_URL, "")
        if not base_url:
            raise LlmUnavailableError(f"{ENV_BASE_URL} is not set")
        return cls(
            base_url=base_url,
            api_key=os.environ.get(ENV_API_KEY, ""),
            model_id=os.environ.get(ENV_MODEL_ID, ""),
        )

    def complete(self, messages: list[ChatMessage], params: CompletionParams) -> str:
        if not messages:
            raise ValueError("messages must be nonempty")
        body = {
            "model": params.model_id or self.model_id,
            "messages": [{"role": m.role, "content": m.content} for m in messages],
            "temperature": params.temperature,
            "max_tokens": params.max_tokens,
        }
        headers = {"Content-Type": "application/json"}
        if self.api_key:
            headers["Authorization"] = f"Bearer {self.api_key}"

        last_error = "no attempt made"
        for attempt in range(_MAX_RETRIES + 1):
            if attempt:
                self._sleep(_BACKOFF_BASE_S * 2 ** (attempt - 1))
            try:
                resp = httpx.post(f"{self.base_url}/chat/completions", json=body, headers=headers, timeout=self._timeout)
            except httpx.HTTPError as exc:
                last_error = f"transport error: {exc}"
                continue
            if resp.status_code in (401, 403):
                raise AuthError(f"endpoint returned {resp.status_code}")
            if resp.status_code == 429 or resp.status_code >= 500:
                last_error = f"status {resp.status_code}"
                continue
            if resp.status_code != 200:
                raise LlmUnavailableError(f"unexpected status {resp.status_code}: {resp.text[:200]}")
            return self._extract(resp)
        raise LlmUnavailableError(f"gave up after {_MAX_RETRIES + 1} attempts: {last_error}")

    @staticmethod
    def _extract(resp: httpx.Response) -> str:
        try:
            payload = resp.json()
            content = payload["choices"][0]["message"]["content"]
        except (ValueError, LookupError, TypeError) as exc:
            raise LlmUnavailableError(f"malformed completion payload: {exc}") from None
        if not isinstance(content, str):
            raise LlmUnavailableError("completion content is not a string")
        return content
