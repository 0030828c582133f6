"""Embedding adapter contract and the built-in deterministic backend."""

from __future__ import annotations

import numpy as np

from teamsim.agents.memory import HashEmbedder


class HashEmbeddingBackend:
    """Token-hash embeddings behind the adapter contract; fully offline."""

    backend_id = "hash-64"

    def __init__(self, dimension: int = 64):
        self.dimension = dimension
        self._embedder = HashEmbedder(dimension)

    def embed(self, text: str) -> list[float]:
        return [float(v) for v in self._embedder.embed(text)]


class AdapterEmbedder:
    """Wraps any EmbeddingBackend as a memory-store embedder."""

    def __init__(self, backend):
        self.backend = backend
        self.dimension = backend.dimension

    def embed(self, text: str) -> np.ndarray:
        vec = np.asarray(self.backend.embed(text), dtype=np.float64)
        if vec.shape != (self.dimension,):
            raise ValueError(
                f"backend returned {vec.shape} vector, expected ({self.dimension},)"
            )
        return vec
