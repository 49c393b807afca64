"""Embedding providers: a hashed bag-of-words oracle and an HTTP endpoint."""
from __future__ import annotations

import re
from collections import Counter
from typing import Any, Dict, List

import httpx
import numpy as np
from tenacity import Retrying, retry_if_exception_type, stop_after_attempt, wait_exponential

from ..core.errors import EmptyText, MalformedResponse, TransportError
from .base import EmbeddingVector

FNV_OFFSET = 0xCBF29CE484222325
FNV_PRIME = 0x100000001B3
_MASK = (1 << 64) - 1
# any run of non-letters, non-digits; letters in any script count
_TOKEN_SPLIT = re.compile(r"[\W_]+")


def fnv1a_64(text: str) -> int:
    h = FNV_OFFSET
    for byte in text.encode("utf-8"):
        h ^= byte
        h = (h * FNV_PRIME) & _MASK
    return h


def tokenize(text: str) -> List[str]:
    return [t for t in _TOKEN_SPLIT.split(text.lower()) if t]


class DeterministicOracle:
    """Feature-hashed bag of words, L2-normalized."""

    def __init__(self, dimension: int = 256) -> None:
        self.dimension = dimension
        self.name = f"oracle-{dimension}"

    def embed(self, text: str) -> EmbeddingVector:
        tokens = tokenize(text)
        if not tokens:
            raise EmptyText("cannot embed text without alphanumeric tokens")
        counts = Counter(fnv1a_64(t) % self.dimension for t in tokens)
        vector = np.zeros(self.dimension, dtype=np.float64)
        for bucket, count in counts.items():
            vector[bucket] = count
        vector /= np.linalg.norm(vector)
        return EmbeddingVector(values=vector.tolist(), dimension=self.dimension)


class HttpEmbedder:
    """OpenAI-style ``/embeddings`` endpoint; vectors are returned as-is."""

    def __init__(
        self,
        model: str,
        api_key: str | None,
        base_url: str = "https://openrouter.ai/api/v1",
        timeout: float = 30.0,
        max_retries: int = 3,
        backoff: float = 1.0,
        transport: httpx.BaseTransport | None = None,
    ) -> None:
        self.model = model
        self.api_key = api_key
        self.base_url = base_url.rstrip("/")
        self.timeout = timeout
        self.max_retries = max_retries
        self.backoff = backoff
        self.transport = transport
        self.name = model
        self.dimension: int | None = None

    def _headers(self) -> Dict[str, str]:
        headers = {"Content-Type": "application/json"}
        if self.api_key:
            headers["Authorization"] = f"Bearer {self.api_key}"
        return headers

    def _post(self, client: httpx.Client, text: str) -> Any:
        response = client.post(
            f"{self.base_url}/embeddings",
            headers=self._headers(),
            json={"model": self.model, "input": text},
        )
        response.raise_for_status()
        return response.json()

    def embed(self, text: str) -> EmbeddingVector:
        if not text.strip():
            raise EmptyText("cannot embed empty text")
        retrying = Retrying(
            stop=stop_after_attempt(self.max_retries + 1),
            wait=wait_exponential(multiplier=self.backoff, min=0, max=60),
            retry=retry_if_exception_type((httpx.TransportError, httpx.HTTPStatusError)),
            reraise=True,
        )
        with httpx.Client(timeout=self.timeout, transport=self.transport) as client:
            try:
                data = retrying(self._post, client, text)
            except (httpx.TransportError, httpx.HTTPStatusError) as exc:
                raise TransportError(f"embedding endpoint failed: {exc}") from exc
        try:
            values = [float(v) for v in data["data"][0]["embedding"]]
        except (KeyError, IndexError, TypeError, ValueError) as exc:
            raise MalformedResponse("embedding response lacks data[0].embedding") from exc
        if self.dimension is None:
            self.dimension = len(values)
        elif len(values) != self.dimension:
            raise MalformedResponse(f"embedding dimension changed from {self.dimension} to {len(values)}")
        return EmbeddingVector(values=values, dimension=len(values))
