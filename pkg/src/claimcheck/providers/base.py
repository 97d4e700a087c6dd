"""Provider contracts and the shared in-flight limiter for HTTP backends."""

from __future__ import annotations

import threading
from contextlib import contextmanager

from ..corroboration import SearchResult

DEFAULT_INFLIGHT_LIMIT = 8

_limiter = threading.BoundedSemaphore(DEFAULT_INFLIGHT_LIMIT)


def set_inflight_limit(n: int) -> None:
    """Replace the global limiter; call before starting a run."""
    global _limiter
    if n < 1:
        raise ValueError("in-flight limit must be at least 1")
    _limiter = threading.BoundedSemaphore(n)


@contextmanager
def inflight_slot():
    with _limiter:
        yield


class ChatProvider:
    """Text-in/text-out chat completion; json_mode requests a JSON-constrained
    reply when the backend supports it."""

    def complete(self, prompt: str, json_mode: bool = False) -> str:
        raise NotImplementedError


class EmbeddingProvider:
    """Batch text embedding; one fixed-dimension vector per input, in order."""

    def embed(self, texts: list[str]) -> list[list[float]]:
        raise NotImplementedError


class VerifierProvider:
    """Calibrated probability that a statement is supported by evidence."""

    def score(self, claim: str, evidence: str) -> float:
        raise NotImplementedError


class SearchProvider:
    """Web search returning at most ``limit`` results."""

    def search(self, query: str, limit: int, site_hints=None) -> list[SearchResult]:
        raise NotImplementedError


def check_embed_inputs(texts: list[str]) -> None:
    if not texts:
        raise ValueError("texts must be nonempty")
    for i, text in enumerate(texts):
        if not isinstance(text, str) or not text:
            raise ValueError(f"texts[{i}] must be a nonempty string")
