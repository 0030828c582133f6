"""Completion backends: HTTP chat endpoint, mocks, cassette record/replay.

Cassette files are versioned JSON keyed by ``tag:sha256(request)``; a recorded
run replays with the live backend disabled, which is what makes model-backed
runs reproducible.
"""

from __future__ import annotations

import json
import time
from pathlib import Path

import httpx

from teamsim.errors import AdapterError, CassetteMiss
from teamsim.llm.adapter import AdapterConfig, CompletionReply, CompletionRequest

CASSETTE_VERSION = 1


class MockEchoBackend:
    """Replies with the user text, truncated to the request cap."""

    backend_id = "mock-echo"

    def complete(self, request: CompletionRequest) -> CompletionReply:
        return CompletionReply(
            text=request.user[: request.max_reply_chars],
            latency_ms=0,
            backend_id=self.backend_id,
        )


class TemplateBackend:
    """Deterministic stand-in for a live model.

    Produces grammar-valid replies per tag so model-backed code paths can be
    exercised and recorded without a network: decisions idle, speakers pass,
    interviews and surveys answer from the prompt's memory section.
    """

    backend_id = "mock-template"

    def complete(self, request: CompletionRequest) -> CompletionReply:
        if request.tag == "decision":
            if "[invitation]" in request.user:
                text = "LISTEN"
            elif "[conversation]" in request.user:
                text = "SAY Understood. [end]"
            else:
                text = "IDLE 1"
        elif request.tag == "speaker":
            first = request.user.split("candidates:", 1)[-1].strip().split(",")[0].strip()
            text = first
        elif request.tag == "interview":
            ids = _memory_ids(request.user)
            cited = ", ".join(f"memory {i}" for i in ids) if ids else "no stored memories"
            text = f"Recalling {cited}: I acted on what I could see at the time."
        elif request.tag == "survey":
            text = "5 | It went about as well as could be expected."
        else:
            text = request.user[: request.max_reply_chars]
        return CompletionReply(text=text[: request.max_reply_chars], latency_ms=0, backend_id=self.backend_id)


def _memory_ids(prompt: str) -> list[int]:
    ids = []
    for line in prompt.splitlines():
        line = line.strip()
        if line.startswith("- [") and "]" in line:
            token = line[3 : line.index("]")]
            if token.isdigit():
                ids.append(int(token))
    return ids


class HttpChatBackend:
    """Chat-completion style HTTP backend (OpenAI-compatible shape)."""

    def __init__(self, config: AdapterConfig, client: httpx.Client | None = None):
        if not config.endpoint:
            raise AdapterError("no endpoint configured")
        self.config = config
        self.backend_id = f"http:{config.model or config.endpoint}"
        self._client = client or httpx.Client(timeout=config.timeout_s)

    def complete(self, request: CompletionRequest) -> CompletionReply:
        headers = {"Content-Type": "application/json", **self.config.extra_headers}
        if self.config.api_key:
            headers["Authorization"] = f"Bearer {self.config.api_key}"
        payload = {
            "model": self.config.model,
            "temperature": request.temperature,
            "messages": [
                {"role": "system", "content": request.system},
                {"role": "user", "content": request.user},
            ],
        }
        started = time.monotonic()
        try:
            response = self._client.post(self.config.endpoint, json=payload, headers=headers)
            response.raise_for_status()
            body = response.json()
            text = body["choices"][0]["message"]["content"]
        except httpx.HTTPError as exc:
            raise AdapterError(f"chat backend request failed: {exc}") from exc
        except (KeyError, IndexError, ValueError) as exc:
            raise AdapterError(f"unexpected chat backend response shape: {exc}") from exc
        latency = int((time.monotonic() - started) * 1000)
        return CompletionReply(text=text, latency_ms=latency, backend_id=self.backend_id)


class Cassette:
    def __init__(self, path: str | Path):
        self.path = Path(path)
        self.entries: dict[str, dict] = {}
        if self.path.exists():
            data = json.loads(self.path.read_text())
            if data.get("format_version") != CASSETTE_VERSION:
                raise AdapterError(
                    f"cassette version {data.get('format_version')} unsupported"
                )
            self.entries = data.get("entries", {})

    def save(self) -> None:
        doc = {"format_version": CASSETTE_VERSION, "entries": self.entries}
        self.path.write_text(json.dumps(doc, sort_keys=True, indent=1))


class RecordingBackend:
    """Wraps a live backend and writes every reply into a cassette."""

    def __init__(self, live, cassette: Cassette):
        self.live = live
        self.cassette = cassette
        self.backend_id = f"recording:{live.backend_id}"

    def complete(self, request: CompletionRequest) -> CompletionReply:
        reply = self.live.complete(request)
        self.cassette.entries[request.cassette_key()] = {
            "text": reply.text,
            "backend_id": reply.backend_id,
        }
        return reply

    def save(self) -> None:
        self.cassette.save()


class ReplayBackend:
    """Serves recorded replies only; a miss in strict mode is an error."""

    def __init__(self, cassette: Cassette, strict: bool = True):
        self.cassette = cassette
        self.strict = strict
        self.backend_id = "replay"

    def complete(self, request: CompletionRequest) -> CompletionReply:
        entry = self.cassette.entries.get(request.cassette_key())
        if entry is None:
            if self.strict:
                raise CassetteMiss(f"no recorded reply for {request.cassette_key()}")
            return CompletionReply(text="IDLE 1", latency_ms=0, backend_id=self.backend_id)
        return CompletionReply(text=entry["text"], latency_ms=0, backend_id=self.backend_id)
