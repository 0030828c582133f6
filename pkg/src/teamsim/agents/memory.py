"""Retrieval-augmented agent memory.

Records are append-only with strictly increasing ids. Retrieval is an exact
exhaustive cosine scan over the store's embedding matrix; at the scale a run
produces (hundreds of records) exact scan is both faster to reason about and
deterministic, and the embedder is pluggable so an approximate or external
index can replace it behind the same interface.

The default embedder is a 64-dimension token-hash bag, L2-normalized, with
token buckets from sha1 so vectors are stable across processes and platforms.
"""

from __future__ import annotations

import hashlib
import re
from dataclasses import dataclass, field
from typing import Iterable, Protocol

import numpy as np

MEMORY_KINDS = ("seed", "observation", "outcome", "message", "reflection")

_TOKEN_RE = re.compile(r"[a-z0-9]+")


class Embedder(Protocol):
    dimension: int

    def embed(self, text: str) -> np.ndarray: ...


class HashEmbedder:
    """Deterministic bag-of-tokens embedding; no external dependency."""

    def __init__(self, dimension: int = 64):
        self.dimension = dimension

    def embed(self, text: str) -> np.ndarray:
        vec = np.zeros(self.dimension, dtype=np.float64)
        for token in _TOKEN_RE.findall(text.lower()):
            bucket = int.from_bytes(hashlib.sha1(token.encode()).digest()[:4], "big")
            vec[bucket % self.dimension] += 1.0
        norm = float(np.linalg.norm(vec))
        if norm > 0.0:
            vec /= norm
        return vec


@dataclass(frozen=True)
class MemoryRecord:
    id: int
    step: int
    text: str
    kind: str
    embedding: tuple[float, ...] = field(repr=False)


@dataclass(frozen=True)
class ScoredMemory:
    record: MemoryRecord
    similarity: float


class MemoryStore:
    """Append-only record store queried by embedding similarity."""

    def __init__(self, embedder: Embedder | None = None):
        self.embedder = embedder or HashEmbedder()
        self._records: list[MemoryRecord] = []
        self._vectors: list[np.ndarray] = []
        self._matrix = np.zeros((0, self.embedder.dimension), dtype=np.float64)
        self._matrix_rows = 0

    def __len__(self) -> int:
        return len(self._records)

    @property
    def records(self) -> list[MemoryRecord]:
        return list(self._records)

    def add(self, text: str, kind: str, step: int) -> MemoryRecord:
        if kind not in MEMORY_KINDS:
            raise ValueError(f"unknown memory kind {kind!r}")
        embedding = self.embedder.embed(text)
        record = MemoryRecord(
            id=len(self._records),
            step=step,
            text=text,
            kind=kind,
            embedding=tuple(float(v) for v in embedding),
        )
        self._records.append(record)
        self._vectors.append(embedding)
        return record

    def _current_matrix(self) -> np.ndarray:
        if self._matrix_rows != len(self._vectors):
            self._matrix = np.asarray(self._vectors, dtype=np.float64)
            self._matrix_rows = len(self._vectors)
        return self._matrix

    def retrieve(self, query: str, k: int) -> list[ScoredMemory]:
        """Top-k records by cosine similarity to the query, ties by ascending id.

        Similarity is defined at 6-decimal precision: the ranking key is the
        rounded value, so the ordering is stable across platforms and BLAS
        summation orders (and matches what the logs print).
        """
        if k <= 0 or not self._records:
            return []
        q = self.embedder.embed(query)
        sims = [round(float(s), 6) for s in self._current_matrix() @ q]
        order = sorted(range(len(self._records)), key=lambda i: (-sims[i], i))
        return [ScoredMemory(self._records[i], sims[i]) for i in order[:k]]

    def texts(self, kind: str | None = None) -> Iterable[str]:
        for r in self._records:
            if kind is None or r.kind == kind:
                yield r.text
