"""LLM backends: the scripted replayer and the HTTP chat client."""

from __future__ import annotations

import json
import threading
from http.server import BaseHTTPRequestHandler, HTTPServer

import pytest

from finops_agent.llm import (
    AuthError,
    ChatMessage,
    CompletionParams,
    HttpChatBackend,
    LlmUnavailableError,
    ScriptConcurrencyError,
    ScriptedBackend,
    ScriptExhaustedError,
    ScriptMismatchError,
    ScriptSchemaError,
    last_user_content,
    load_script,
)

PARAMS = CompletionParams()


def _msgs(text: str) -> list[ChatMessage]:
    return [ChatMessage("system", "rules"), ChatMessage("user", text)]


def _write_script(tmp_path, entries, name="s.json"):
    path = tmp_path / name
    path.write_text(json.dumps(entries), encoding="utf-8")
    return path


class TestScripted:
    def test_entries_consumed_in_order(self, tmp_path):
        path = _write_script(tmp_path, [{"response": "one"}, {"response": "two"}])
        backend = ScriptedBackend.from_file(path)
        assert backend.complete(_msgs("a"), PARAMS) == "one"
        assert backend.complete(_msgs("b"), PARAMS) == "two"
        assert backend.consumed == 2

    def test_match_substring_enforced(self, tmp_path):
        path = _write_script(tmp_path, [{"match": "please", "response": "ok"}])
        backend = ScriptedBackend.from_file(path)
        with pytest.raises(ScriptMismatchError):
            backend.complete(_msgs("no magic word"), PARAMS)

    def test_match_checks_last_user_message(self, tmp_path):
        path = _write_script(tmp_path, [{"match": "second", "response": "ok"}])
        backend = ScriptedBackend.from_file(path)
        messages = [
            ChatMessage("user", "first"),
            ChatMessage("assistant", "second"),
            ChatMessage("user", "second try"),
        ]
        assert backend.complete(messages, PARAMS) == "ok"
        assert last_user_content(messages) == "second try"

    def test_exhaustion(self, tmp_path):
        path = _write_script(tmp_path, [{"response": "only"}])
        backend = ScriptedBackend.from_file(path)
        backend.complete(_msgs("x"), PARAMS)
        with pytest.raises(ScriptExhaustedError):
            backend.complete(_msgs("x"), PARAMS)

    def test_model_id_defaults_to_stem(self, tmp_path):
        path = _write_script(tmp_path, [{"response": "r"}], name="golden_run.json")
        assert ScriptedBackend.from_file(path).model_id == "golden_run"
        assert ScriptedBackend.from_file(path, model_id="alias").model_id == "alias"

    @pytest.mark.parametrize(
        "payload",
        [{"not": "a list"}, [{"response": 7}], [{"match": 3, "response": "x"}], [{}]],
    )
    def test_schema_errors(self, tmp_path, payload):
        path = tmp_path / "bad.json"
        path.write_text(json.dumps(payload), encoding="utf-8")
        with pytest.raises(ScriptSchemaError):
            load_script(path)

    def test_single_consumer_lock(self, tmp_path):
        path = _write_script(tmp_path, [{"response": "slow"}, {"response": "slow"}])
        backend = ScriptedBackend.from_file(path)
        inside = threading.Event()
        release = threading.Event()
        errors: list[Exception] = []

        original = backend._entries

        class Sticky(list):
            def __getitem__(self, item):
                inside.set()
                release.wait(timeout=5)
                return original[item]

        backend._entries = Sticky(original)

        def first():
            try:
                backend.complete(_msgs("a"), PARAMS)
            except Exception as exc:  # pragma: no cover - diagnostic only
                errors.append(exc)

        t = threading.Thread(target=first)
        t.start()
        assert inside.wait(timeout=5)
        with pytest.raises(ScriptConcurrencyError):
            backend.complete(_msgs("b"), PARAMS)
        release.set()
        t.join(timeout=5)
        assert not errors

    def test_packaged_scripts_all_load(self):
        from finops_agent.assets import SCRIPTS_DIR

        names = sorted(p.name for p in SCRIPTS_DIR.glob("*.json"))
        assert {
            "always_bad.json",
            "bad_then_good.json",
            "demo_session.json",
            "followup.json",
            "late_recognition.json",
            "lazy.json",
            "perfect.json",
        } <= set(names)
        for name in names:
            load_script(SCRIPTS_DIR / name)


class _Responder(BaseHTTPRequestHandler):
    plan: list[tuple[int, dict | str]] = []
    seen: list[dict] = []

    def do_POST(self):  # noqa: N802 - http.server API
        length = int(self.headers.get("Content-Length", "0"))
        body = json.loads(self.rfile.read(length))
        type(self).seen.append({"path": self.path, "auth": self.headers.get("Authorization"), "body": body})
        status, payload = self.plan.pop(0) if self.plan else (500, "exhausted")
        data = json.dumps(payload).encode() if isinstance(payload, dict) else str(payload).encode()
        self.send_response(status)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(data)))
        self.end_headers()
        self.wfile.write(data)

    def log_message(self, *args):  # quiet
        pass


@pytest.fixture()
def chat_server():
    server = HTTPServer(("127.0.0.1", 0), _Responder)
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    _Responder.plan = []
    _Responder.seen = []
    yield server
    server.shutdown()


def _ok_payload(text: str) -> dict:
    return {"choices": [{"message": {"content": text}}]}


class TestHttpBackend:
    def test_from_env_requires_base_url(self, monkeypatch):
        monkeypatch.delenv("LLM_BASE_URL", raising=False)
        with pytest.raises(LlmUnavailableError):
            HttpChatBackend.from_env()

    def test_from_env_reads_settings(self, monkeypatch):
        monkeypatch.setenv("LLM_BASE_URL", "http://example.invalid/v1/")
        monkeypatch.setenv("LLM_API_KEY", "k-123")
        monkeypatch.setenv("LLM_MODEL_ID", "m-1")
        backend = HttpChatBackend.from_env()
        assert backend.base_url == "http://example.invalid/v1"
        assert backend.api_key == "k-123"
        assert backend.model_id == "m-1"

    def test_request_shape_and_response(self, chat_server):
        host, port = chat_server.server_address
        _Responder.plan = [(200, _ok_payload("hello"))]
        backend = HttpChatBackend(f"http://{host}:{port}", api_key="secret", model_id="m")
        out = backend.complete(_msgs("hi there"), CompletionParams())
        assert out == "hello"
        (request,) = _Responder.seen
        assert request["path"] == "/chat/completions"
        assert request["auth"] == "Bearer secret"
        assert request["body"]["model"] == "m"
        assert request["body"]["messages"][-1] == {"role": "user", "content": "hi there"}

    def test_retries_on_server_errors_then_succeeds(self, chat_server):
        host, port = chat_server.server_address
        _Responder.plan = [(500, "boom"), (429, "slow down"), (200, _ok_payload("fine"))]
        sleeps: list[float] = []
        backend = HttpChatBackend(f"http://{host}:{port}", sleep=sleeps.append)
        assert backend.complete(_msgs("x"), PARAMS) == "fine"
        assert len(_Responder.seen) == 3
        assert sleeps == [0.5, 1.0]  # exponential backoff between attempts

    def test_gives_up_after_retry_budget(self, chat_server):
        host, port = chat_server.server_address
        _Responder.plan = [(503, "a"), (503, "b"), (503, "c"), (503, "d"), (503, "e")]
        backend = HttpChatBackend(f"http://{host}:{port}", sleep=lambda _: None)
        with pytest.raises(LlmUnavailableError):
            backend.complete(_msgs("x"), PARAMS)
        assert len(_Responder.seen) == 4  # initial try + three retries

    def test_auth_errors_do_not_retry(self, chat_server):
        host, port = chat_server.server_address
        _Responder.plan = [(401, "no")]
        backend = HttpChatBackend(f"http://{host}:{port}", sleep=lambda _: None)
        with pytest.raises(AuthError):
            backend.complete(_msgs("x"), PARAMS)
        assert len(_Responder.seen) == 1

    def test_malformed_payload(self, chat_server):
        host, port = chat_server.server_address
        _Responder.plan = [(200, {"choices": []})]
        backend = HttpChatBackend(f"http://{host}:{port}", sleep=lambda _: None)
        with pytest.raises(LlmUnavailableError):
            backend.complete(_msgs("x"), PARAMS)

    def test_connection_refused_is_unavailable(self):
        backend = HttpChatBackend("http://127.0.0.1:9", sleep=lambda _: None)
        with pytest.raises(LlmUnavailableError):
            backend.complete(_msgs("x"), PARAMS)

    def test_empty_messages_rejected(self):
        backend = HttpChatBackend("http://127.0.0.1:9")
        with pytest.raises(ValueError):
            backend.complete([], PARAMS)
