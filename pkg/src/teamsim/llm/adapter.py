"""The single boundary to external model backends.

Every completion in the system flows through :class:`CompletionClient`, which
adds per-call timeouts, bounded retries with exponential backoff, a circuit
breaker, and a concurrency cap. Requests carry a purpose tag and are digested
so recorded runs can be replayed offline byte-for-byte. No other module in
the package performs network requests to model backends.
"""

from __future__ import annotations

import hashlib
import threading
import time
from dataclasses import dataclass, field
from typing import Protocol

from teamsim.errors import AdapterTimeout, AdapterUnavailable

TAGS = ("decision", "speaker", "interview", "survey", "generator")

DEFAULT_RETRIES = 2
DEFAULT_TIMEOUT_S = 30.0
DEFAULT_BACKOFF_S = 0.1
DEFAULT_CONCURRENCY = 4
CIRCUIT_FAILURES = 5
CIRCUIT_COOLDOWN_S = 30.0


@dataclass(frozen=True)
class CompletionRequest:
    system: str
    user: str
    tag: str
    max_reply_chars: int = 2000
    temperature: float = 0.0

    def __post_init__(self):
        if self.max_reply_chars < 1:
            raise ValueError("max_reply_chars must be >= 1")
        if self.tag not in TAGS:
            raise ValueError(f"unknown tag {self.tag!r}")

    def digest(self) -> str:
        h = hashlib.sha256()
        for part in (self.system, self.user, str(self.max_reply_chars), f"{self.temperature:.6f}"):
            h.update(part.encode())
            h.update(b"\x00")
        return h.hexdigest()

    def cassette_key(self) -> str:
        return f"{self.tag}:{self.digest()}"


@dataclass(frozen=True)
class CompletionReply:
    text: str
    latency_ms: int
    backend_id: str


class CompletionBackend(Protocol):
    backend_id: str

    def complete(self, request: CompletionRequest) -> CompletionReply: ...


class EmbeddingBackend(Protocol):
    backend_id: str
    dimension: int

    def embed(self, text: str) -> list[float]: ...


class CompletionClient:
    """Retry/timeout/circuit-breaker wrapper around a backend.

    ``clock`` and ``sleep`` are injectable for tests. The circuit opens after
    ``circuit_failures`` consecutive failures and stays open for
    ``circuit_cooldown_s`` seconds, during which calls fail fast with
    AdapterUnavailable.
    """

    def __init__(
        self,
        backend: CompletionBackend,
        retries: int = DEFAULT_RETRIES,
        timeout_s: float = DEFAULT_TIMEOUT_S,
        backoff_s: float = DEFAULT_BACKOFF_S,
        concurrency: int = DEFAULT_CONCURRENCY,
        circuit_failures: int = CIRCUIT_FAILURES,
        circuit_cooldown_s: float = CIRCUIT_COOLDOWN_S,
        clock=time.monotonic,
        sleep=time.sleep,
    ):
        self.backend = backend
        self.retries = retries
        self.timeout_s = timeout_s
        self.backoff_s = backoff_s
        self.circuit_failures = circuit_failures
        self.circuit_cooldown_s = circuit_cooldown_s
        self._clock = clock
        self._sleep = sleep
        self._semaphore = threading.BoundedSemaphore(concurrency)
        self._lock = threading.Lock()
        self._consecutive_failures = 0
        self._open_until: float | None = None

    def _check_circuit(self):
        with self._lock:
            if self._open_until is not None:
                if self._clock() < self._open_until:
                    raise AdapterUnavailable(
                        f"circuit open for backend {self.backend.backend_id!r}"
                    )
                self._open_until = None
                self._consecutive_failures = 0

    def _record(self, ok: bool):
        with self._lock:
            if ok:
                self._consecutive_failures = 0
            else:
                self._consecutive_failures += 1
                if self._consecutive_failures >= self.circuit_failures:
                    self._open_until = self._clock() + self.circuit_cooldown_s

    def _call_once(self, request: CompletionRequest) -> CompletionReply:
        started = self._clock()
        reply = self.backend.complete(request)
        if self._clock() - started > self.timeout_s:
            raise AdapterTimeout(
                f"backend {self.backend.backend_id!r} exceeded {self.timeout_s}s"
            )
        return reply

    def complete(self, request: CompletionRequest) -> CompletionReply:
        self._check_circuit()
        last_error: Exception | None = None
        with self._semaphore:
            for attempt in range(self.retries + 1):
                try:
                    reply = self._call_once(request)
                except AdapterUnavailable:
                    self._record(False)
                    raise
                except Exception as exc:
                    last_error = exc
                    self._record(False)
                    if attempt < self.retries:
                        self._sleep(self.backoff_s * (2**attempt))
                    continue
                self._record(True)
                if len(reply.text) > request.max_reply_chars:
                    reply = CompletionReply(
                        text=reply.text[: request.max_reply_chars],
                        latency_ms=reply.latency_ms,
                        backend_id=reply.backend_id,
                    )
                return reply
        if isinstance(last_error, AdapterTimeout):
            raise last_error
        raise AdapterTimeout(f"backend failed after {self.retries + 1} attempts: {last_error}")


@dataclass
class AdapterConfig:
    """Backend connection settings, loadable from file plus environment."""

    endpoint: str = ""
    api_key: str = ""
    model: str = ""
    timeout_s: float = DEFAULT_TIMEOUT_S
    retries: int = DEFAULT_RETRIES
    concurrency: int = DEFAULT_CONCURRENCY
    extra_headers: dict[str, str] = field(default_factory=dict)

    @classmethod
    def load(cls, path: str | None = None, env: dict[str, str] | None = None) -> "AdapterConfig":
        import os

        import yaml

        env = env if env is not None else dict(os.environ)
        data: dict = {}
        if path:
            with open(path) as fh:
                data = yaml.safe_load(fh) or {}
        cfg = cls(
            endpoint=data.get("endpoint", ""),
            api_key=data.get("api_key", ""),
            model=data.get("model", ""),
            timeout_s=float(data.get("timeout_s", DEFAULT_TIMEOUT_S)),
            retries=int(data.get("retries", DEFAULT_RETRIES)),
            concurrency=int(data.get("concurrency", DEFAULT_CONCURRENCY)),
            extra_headers=dict(data.get("extra_headers", {})),
        )
        cfg.endpoint = env.get("TEAMSIM_LLM_ENDPOINT", cfg.endpoint)
        cfg.api_key = env.get("TEAMSIM_LLM_API_KEY", cfg.api_key)
        cfg.model = env.get("TEAMSIM_LLM_MODEL", cfg.model)
        return cfg
