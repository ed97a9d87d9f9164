"""Embedding providers behind one contract.

Two providers ship here: a remote client speaking the common embeddings
wire protocol (production), and a deterministic local hash embedder used
for tests and offline demos. Both are stateless after construction and
safe for concurrent use. A store must never mix vectors from different
providers; the persisted manifest's dimension acts as the guard.
"""

from __future__ import annotations

import os
import re
from dataclasses import dataclass

import numpy as np
import requests

API_KEY_ENV = "TALK2X_EMBED_API_KEY"

_FNV_OFFSET = 0xCBF29CE484222325
_FNV_PRIME = 0x100000001B3
_TOKEN_RE = re.compile(r"[^\W_]+")  # unicode alphanumerics, no underscore


class EmbeddingError(Exception):
    """Remote embedding failed: transport, malformed response, or bad shape."""


@dataclass
class EmbedderConfig:
    """Provider selection plus the knobs shared by both providers."""

    provider: str = "local-hash"  # "remote" or "local-hash"
    dimension: int = 256
    endpoint: str | None = None
    model_name: str | None = None
    request_timeout: float = 30.0

    def __post_init__(self):
        if self.provider not in ("remote", "local-hash"):
            raise ValueError(f"unknown embedding provider {self.provider!r}")
        if self.dimension <= 0:
            raise ValueError(f"dimension must be positive, got {self.dimension}")
        if self.provider == "remote" and not self.endpoint:
            raise ValueError("remote embedding provider requires an endpoint")


def fnv1a64(data: bytes) -> int:
    """64-bit FNV-1a hash; fixed constants keep it identical on every platform."""
    h = _FNV_OFFSET
    for byte in data:
        h ^= byte
        h = (h * _FNV_PRIME) & 0xFFFFFFFFFFFFFFFF
    return h


class LocalHashEmbedder:
    """Deterministic hashed bag-of-words embedding.

    Lowercase the text, split on non-alphanumeric characters, drop empty
    tokens, bucket each token by FNV-1a(token) mod dimension, count, then
    L2-normalize (unless the vector is all zero, which happens exactly for
    token-free text).
    """

    def __init__(self, dimension: int = 256):
        if dimension <= 0:
            raise ValueError(f"dimension must be positive, got {dimension}")
        self.dimension = dimension

    def embed_text(self, text: str) -> np.ndarray:
        counts = np.zeros(self.dimension, dtype=np.float64)
        for token in _TOKEN_RE.findall(text.lower()):
            counts[fnv1a64(token.encode("utf-8")) % self.dimension] += 1.0
        norm = float(np.sqrt(np.sum(counts * counts)))
        if norm > 0.0:
            counts /= norm
        return counts.astype(np.float32)

    def embed_batch(self, texts: list[str]) -> list[np.ndarray]:
        return [self.embed_text(text) for text in texts]


class RemoteEmbedder:
    """Client for the widely deployed POST {endpoint}/embeddings protocol.

    Request: {"model": str, "input": [str]}; response carries
    {"data": [{"index": int, "embedding": [floats]}]}. The API key, if
    any, is read from the TALK2X_EMBED_API_KEY environment variable.
    """

    def __init__(self, config: EmbedderConfig, session: requests.Session | None = None):
        if config.provider != "remote":
            raise ValueError("RemoteEmbedder requires a remote-provider config")
        self.config = config
        self.dimension = config.dimension
        self._session = session or requests.Session()

    def embed_text(self, text: str) -> np.ndarray:
        return self.embed_batch([text])[0]

    def embed_batch(self, texts: list[str]) -> list[np.ndarray]:
        if not texts:
            return []
        url = self.config.endpoint.rstrip("/") + "/embeddings"
        headers = {"Content-Type": "application/json"}
        api_key = os.environ.get(API_KEY_ENV)
        if api_key:
            headers["Authorization"] = f"Bearer {api_key}"
        try:
            response = self._session.post(
                url,
                json={"model": self.config.model_name, "input": list(texts)},
                headers=headers,
                timeout=self.config.request_timeout,
            )
            response.raise_for_status()
            payload = response.json()
        except requests.RequestException as exc:
            raise EmbeddingError(f"embedding request to {url} failed: {exc}") from exc
        except ValueError as exc:
            raise EmbeddingError(f"embedding response is not JSON: {exc}") from exc

        data = payload.get("data")
        if not isinstance(data, list):
            raise EmbeddingError("embedding response has no 'data' list")
        if len(data) != len(texts):
            raise EmbeddingError(
                f"requested {len(texts)} embeddings, response carries {len(data)}"
            )
        vectors: list[np.ndarray | None] = [None] * len(texts)
        for item in data:
            try:
                index = item["index"]
                values = item["embedding"]
            except (TypeError, KeyError) as exc:
                raise EmbeddingError(f"malformed embedding item: {item!r}") from exc
            if not isinstance(index, int) or not 0 <= index < len(texts):
                raise EmbeddingError(f"embedding item has bad index {index!r}")
            vec = np.asarray(values, dtype=np.float32)
            if vec.ndim != 1 or vec.shape[0] != self.dimension:
                raise EmbeddingError(
                    f"embedding at index {index} has {vec.shape} shape, expected ({self.dimension},)"
                )
            vectors[index] = vec
        if any(v is None for v in vectors):
            raise EmbeddingError("embedding response indexes do not cover the batch")
        return vectors  # type: ignore[return-value]


def create_embedder(config: EmbedderConfig):
    """Build the provider named by the config."""
    if config.provider == "local-hash":
        return LocalHashEmbedder(config.dimension)
    return RemoteEmbedder(config)
