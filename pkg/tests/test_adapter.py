"""Model-backend boundary: retries, circuit breaking, cassettes, isolation."""

from __future__ import annotations

import json
from pathlib import Path

import httpx
import pytest

from teamsim.errors import AdapterError, AdapterTimeout, AdapterUnavailable, CassetteMiss
from teamsim.llm.adapter import AdapterConfig, CompletionClient, CompletionReply, CompletionRequest
from teamsim.llm.backends import (
    Cassette,
    HttpChatBackend,
    MockEchoBackend,
    RecordingBackend,
    ReplayBackend,
    TemplateBackend,
)
from teamsim.llm.embedding import AdapterEmbedder, HashEmbeddingBackend


def req(user="hello world", tag="decision", **kwargs):
    return CompletionRequest(system="sys", user=user, tag=tag, **kwargs)


def test_echo_backend_truncates_to_cap():
    reply = MockEchoBackend().complete(req(user="abcdefgh", max_reply_chars=4))
    assert reply.text == "abcd"


def test_request_digest_stable_and_sensitive():
    a, b = req(), req()
    assert a.digest() == b.digest()
    assert req(user="other").digest() != a.digest()
    assert req(tag="survey").cassette_key() != a.cassette_key()


def test_unknown_tag_rejected():
    with pytest.raises(ValueError):
        CompletionRequest(system="s", user="u", tag="gossip")


class FlakyBackend:
    backend_id = "flaky"

    def __init__(self, failures: int):
        self.failures = failures
        self.calls = 0

    def complete(self, request):
        self.calls += 1
        if self.calls <= self.failures:
            raise RuntimeError("transient")
        return CompletionReply(text="ok", latency_ms=1, backend_id=self.backend_id)


def test_retries_with_backoff_then_success():
    sleeps = []
    backend = FlakyBackend(failures=2)
    client = CompletionClient(backend, retries=2, backoff_s=0.1, sleep=sleeps.append)
    reply = client.complete(req())
    assert reply.text == "ok"
    assert backend.calls == 3
    assert sleeps == [0.1, 0.2]  # exponential


def test_retries_exhausted_raises():
    client = CompletionClient(FlakyBackend(failures=10), retries=1, backoff_s=0, sleep=lambda s: None)
    with pytest.raises(AdapterTimeout):
        client.complete(req())


def test_circuit_opens_then_recovers_after_cooldown():
    clock = [0.0]
    backend = FlakyBackend(failures=3)
    client = CompletionClient(
        backend,
        retries=0,
        backoff_s=0,
        circuit_failures=3,
        circuit_cooldown_s=10,
        clock=lambda: clock[0],
        sleep=lambda s: None,
    )
    for _ in range(3):
        with pytest.raises(AdapterTimeout):
            client.complete(req())
    with pytest.raises(AdapterUnavailable):
        client.complete(req())
    assert backend.calls == 3  # fail-fast while open
    clock[0] = 11.0
    assert client.complete(req()).text == "ok"


def test_slow_backend_times_out():
    clock = [0.0]

    class Slow:
        backend_id = "slow"

        def complete(self, request):
            clock[0] += 100.0
            return CompletionReply(text="late", latency_ms=100000, backend_id="slow")

    client = CompletionClient(Slow(), retries=0, timeout_s=1.0, clock=lambda: clock[0], sleep=lambda s: None)
    with pytest.raises(AdapterTimeout):
        client.complete(req())


def test_reply_truncated_to_request_cap():
    client = CompletionClient(TemplateBackend())
    reply = client.complete(req(tag="survey", max_reply_chars=3))
    assert len(reply.text) == 3


# --- cassettes -----------------------------------------------------------------


def test_record_then_strict_replay(tmp_path: Path):
    path = tmp_path / "tape.json"
    recorder = RecordingBackend(TemplateBackend(), Cassette(path))
    live_reply = recorder.complete(req(tag="survey"))
    recorder.save()
    replay = ReplayBackend(Cassette(path), strict=True)
    replayed = replay.complete(req(tag="survey"))
    assert replayed.text == live_reply.text
    assert replayed.latency_ms == 0
    with pytest.raises(CassetteMiss):
        replay.complete(req(user="never recorded", tag="survey"))


def test_nonstrict_replay_degrades_to_idle(tmp_path: Path):
    path = tmp_path / "tape.json"
    Cassette(path)  # empty
    replay = ReplayBackend(Cassette(path), strict=False)
    assert replay.complete(req()).text == "IDLE 1"


def test_cassette_version_checked(tmp_path: Path):
    path = tmp_path / "tape.json"
    path.write_text(json.dumps({"format_version": 99, "entries": {}}))
    with pytest.raises(AdapterError):
        Cassette(path)


# --- HTTP backend (mock transport) ------------------------------------------------


def test_http_backend_request_shape_and_parse():
    seen = {}

    def handler(request: httpx.Request) -> httpx.Response:
        seen["url"] = str(request.url)
        seen["body"] = json.loads(request.content)
        seen["auth"] = request.headers.get("authorization")
        return httpx.Response(
            200, json={"choices": [{"message": {"content": "IDLE 1"}}]}
        )

    config = AdapterConfig(endpoint="https://models.example/v1/chat", api_key="k123", model="m1")
    backend = HttpChatBackend(config, client=httpx.Client(transport=httpx.MockTransport(handler)))
    reply = backend.complete(req())
    assert reply.text == "IDLE 1"
    assert seen["url"] == "https://models.example/v1/chat"
    assert seen["auth"] == "Bearer k123"
    assert seen["body"]["model"] == "m1"
    assert seen["body"]["temperature"] == 0.0
    assert [m["role"] for m in seen["body"]["messages"]] == ["system", "user"]


def test_http_backend_error_wrapped():
    def handler(request: httpx.Request) -> httpx.Response:
        return httpx.Response(500, text="boom")

    config = AdapterConfig(endpoint="https://models.example/v1/chat")
    backend = HttpChatBackend(config, client=httpx.Client(transport=httpx.MockTransport(handler)))
    with pytest.raises(AdapterError):
        backend.complete(req())


def test_config_env_overrides(tmp_path: Path):
    config_file = tmp_path / "llm.yaml"
    config_file.write_text("endpoint: https://file.example\nmodel: file-model\ntimeout_s: 5\n")
    config = AdapterConfig.load(
        str(config_file),
        env={"TEAMSIM_LLM_ENDPOINT": "https://env.example", "TEAMSIM_LLM_API_KEY": "envkey"},
    )
    assert config.endpoint == "https://env.example"
    assert config.api_key == "envkey"
    assert config.model == "file-model"
    assert config.timeout_s == 5.0


# --- embeddings ---------------------------------------------------------------------


def test_embedding_backend_contract():
    backend = HashEmbeddingBackend(dimension=32)
    vec = backend.embed("hello world")
    assert len(vec) == 32
    embedder = AdapterEmbedder(backend)
    arr = embedder.embed("hello world")
    assert arr.shape == (32,)


def test_embedding_dimension_mismatch_detected():
    class Wrong:
        backend_id = "wrong"
        dimension = 8

        def embed(self, text):
            return [0.0] * 4

    with pytest.raises(ValueError):
        AdapterEmbedder(Wrong()).embed("x")


# --- architectural isolation -----------------------------------------------------


def test_only_the_adapter_layer_touches_model_transports():
    """No package module outside teamsim/llm imports an HTTP client library."""
    import teamsim

    package_root = Path(teamsim.__file__).parent
    offenders = []
    for path in package_root.rglob("*.py"):
        rel = path.relative_to(package_root)
        if rel.parts[0] == "llm":
            continue
        text = path.read_text()
        for needle in ("import httpx", "import requests", "import urllib.request", "import aiohttp"):
            if needle in text:
                offenders.append((str(rel), needle))
    assert not offenders, f"transport imports outside the adapter: {offenders}"
