"""Deterministic offline backends.

These make end-to-end runs reproducible without any network: a scripted
chat, a feature-hash embedder, a token-containment verifier, and a
fixture-file search. The lexical verifier is an intentionally simple
stand-in for an NLI model -- test-only quality, fully specifiable.
"""

from __future__ import annotations

import hashlib
import json
import math
import threading

from ..corroboration import SearchResult
from ..errors import ProviderError
from ..textutil import token_list
from .base import (
    ChatProvider,
    EmbeddingProvider,
    SearchProvider,
    VerifierProvider,
    check_embed_inputs,
)


def prompt_digest(prompt: str) -> str:
    """Key used by digest-scripted chat fixtures."""
    return hashlib.sha256(prompt.encode("utf-8")).hexdigest()


class ScriptedChatProvider(ChatProvider):
    """Replays canned responses.

    A list is consumed in order; a dict maps prompt digests (see
    ``prompt_digest``) to targeted responses and wins over the queue.
    """

    def __init__(self, responses=None, by_digest=None):
        self._queue = list(responses or [])
        self._by_digest = dict(by_digest or {})
        self._lock = threading.Lock()
        self.calls = 0

    @classmethod
    def from_file(cls, path) -> "ScriptedChatProvider":
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
        if isinstance(data, list):
            return cls(responses=data)
        if isinstance(data, dict):
            return cls(by_digest=data)
        raise ProviderError(f"chat script {path} must be a JSON list or object")

    def complete(self, prompt: str, json_mode: bool = False) -> str:
        with self._lock:
            self.calls += 1
            digest = prompt_digest(prompt)
            if digest in self._by_digest:
                return self._by_digest[digest]
            if self._queue:
                return self._queue.pop(0)
        raise ProviderError("scripted chat has no response for this prompt")


class HashEmbeddingProvider(EmbeddingProvider):
    """Signed feature hashing of token counts, L2-normalized.

    Bit-deterministic across runs and platforms (sha256-based); collision
    behavior is irrelevant to the contract tests it serves.
    """

    def __init__(self, dim: int = 256):
        if dim < 1:
            raise ValueError("embedding dimension must be at least 1")
        self.dim = dim

    def embed(self, texts: list[str]) -> list[list[float]]:
        check_embed_inputs(texts)
        return [self._vector(text) for text in texts]

    def _vector(self, text: str) -> list[float]:
        tokens = token_list(text) or [text]
        vec = [0.0] * self.dim
        for token in tokens:
            digest = hashlib.sha256(token.encode("utf-8")).digest()
            index = int.from_bytes(digest[:4], "big") % self.dim
            sign = 1.0 if digest[4] % 2 == 0 else -1.0
            vec[index] += sign
        norm = math.sqrt(sum(x * x for x in vec))
        if norm == 0.0:
            # exact sign cancellation; fall back to a deterministic unit basis vector
            digest = hashlib.sha256(text.encode("utf-8")).digest()
            vec[int.from_bytes(digest[:4], "big") % self.dim] = 1.0
            return vec
        return [x / norm for x in vec]


class LexicalVerifierProvider(VerifierProvider):
    """Claim-token containment in the evidence; deterministic, test-only."""

    def score(self, claim: str, evidence: str) -> float:
        claim_tokens = set(token_list(claim))
        if not claim_tokens:
            return 0.0
        evidence_tokens = set(token_list(evidence))
        return len(claim_tokens & evidence_tokens) / len(claim_tokens)


class FixtureSearchProvider(SearchProvider):
    """Exact-query lookup in a fixture map; misses return no results."""

    def __init__(self, mapping: dict):
        self._mapping = dict(mapping)
        self._lock = threading.Lock()
        self.calls = 0

    @classmethod
    def from_file(cls, path) -> "FixtureSearchProvider":
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
        if not isinstance(data, dict):
            raise ProviderError(f"search fixture {path} must be a JSON object")
        return cls(data)

    def search(self, query: str, limit: int, site_hints=None) -> list[SearchResult]:
        if not query:
            raise ValueError("query must be nonempty")
        if limit < 1:
            raise ValueError("limit must be at least 1")
        with self._lock:
            self.calls += 1
        entries = self._mapping.get(query, [])
        return [
            SearchResult(
                url=entry["url"],
                title=entry.get("title", ""),
                snippet=entry.get("snippet", ""),
            )
            for entry in entries[:limit]
        ]
