"""HTTP-backed providers.

The chat and embedding backends speak a chat-completions-style JSON API;
the verifier and search backends use the minimal wire contracts documented
in the README. All requests share the global in-flight limiter, retry with
exponential backoff, and can be fronted by a RequestCache.
"""

from __future__ import annotations

import logging
import time

import requests

from ..corroboration import SearchResult
from ..errors import ProtocolError, ProviderError
from .base import (
    ChatProvider,
    EmbeddingProvider,
    SearchProvider,
    VerifierProvider,
    check_embed_inputs,
    inflight_slot,
)
from .cache import RequestCache

logger = logging.getLogger(__name__)

DEFAULT_TIMEOUT = 60.0
DEFAULT_ATTEMPTS = 3
DEFAULT_BACKOFF = 0.5


class HttpTransport:
    """POST JSON with bounded retries; retried requests are byte-identical."""

    def __init__(
        self,
        api_key: str | None = None,
        session: requests.Session | None = None,
        timeout: float = DEFAULT_TIMEOUT,
        attempts: int = DEFAULT_ATTEMPTS,
        backoff: float = DEFAULT_BACKOFF,
    ):
        self.api_key = api_key
        self.session = session or requests.Session()
        self.timeout = timeout
        self.attempts = max(1, attempts)
        self.backoff = backoff

    def _headers(self) -> dict:
        headers = {"Content-Type": "application/json"}
        if self.api_key:
            headers["Authorization"] = f"Bearer {self.api_key}"
        return headers

    def post_json(self, url: str, payload: dict):
        last_failure = None
        for attempt in range(self.attempts):
            if attempt:
                time.sleep(self.backoff * (2 ** (attempt - 1)))
            try:
                with inflight_slot():
                    response = self.session.post(
                        url, json=payload, headers=self._headers(), timeout=self.timeout
                    )
            except requests.RequestException as exc:
                last_failure = exc
                logger.debug("request to %s failed (attempt %d): %s", url, attempt + 1, exc)
                continue
            if 200 <= response.status_code < 300:
                try:
                    return response.json()
                except ValueError as exc:
                    raise ProtocolError(f"non-JSON response from {url}") from exc
            if response.status_code == 429 or response.status_code >= 500:
                last_failure = f"HTTP {response.status_code}"
                continue
            raise ProviderError(f"HTTP {response.status_code} from {url}")
        raise ProviderError(f"request to {url} failed after {self.attempts} attempts: {last_failure}")


class HttpChatProvider(ChatProvider):
    def __init__(
        self,
        base_url: str,
        model: str,
        api_key: str | None = None,
        cache: RequestCache | None = None,
        transport: HttpTransport | None = None,
        **transport_kwargs,
    ):
        self.base_url = base_url.rstrip("/")
        self.model = model
        self.cache = cache
        self.transport = transport or HttpTransport(api_key=api_key, **transport_kwargs)
        self.identity = f"chat:{self.base_url}:{self.model}"

    def complete(self, prompt: str, json_mode: bool = False) -> str:
        if not prompt:
            raise ValueError("prompt must be nonempty")
        payload = {
            "model": self.model,
            "messages": [{"role": "user", "content": prompt}],
            "temperature": 0,
        }
        if json_mode:
            payload["response_format"] = {"type": "json_object"}
        cache_payload = {"backend": self.identity, "request": payload}
        if self.cache is not None:
            hit = self.cache.get("chat", cache_payload)
            if hit is not None:
                return hit
        data = self.transport.post_json(f"{self.base_url}/chat/completions", payload)
        try:
            text = data["choices"][0]["message"]["content"]
        except (KeyError, IndexError, TypeError) as exc:
            raise ProtocolError(f"malformed chat completion response: {exc}") from exc
        if not isinstance(text, str):
            raise ProtocolError("chat completion content is not text")
        if self.cache is not None:
            self.cache.put("chat", cache_payload, text)
        return text


class HttpEmbeddingProvider(EmbeddingProvider):
    def __init__(
        self,
        base_url: str,
        model: str,
        api_key: str | None = None,
        cache: RequestCache | None = None,
        transport: HttpTransport | None = None,
        **transport_kwargs,
    ):
        self.base_url = base_url.rstrip("/")
        self.model = model
        self.cache = cache
        self.transport = transport or HttpTransport(api_key=api_key, **transport_kwargs)
        self.identity = f"embedding:{self.base_url}:{self.model}"

    def embed(self, texts: list[str]) -> list[list[float]]:
        check_embed_inputs(texts)
        payload = {"model": self.model, "input": list(texts)}
        cache_payload = {"backend": self.identity, "request": payload}
        if self.cache is not None:
            hit = self.cache.get("embedding", cache_payload)
            if hit is not None:
                return hit
        data = self.transport.post_json(f"{self.base_url}/embeddings", payload)
        items = data.get("data")
        if not isinstance(items, list) or len(items) != len(texts):
            raise ProtocolError("embedding response does not match the input batch")
        try:
            ordered = sorted(items, key=lambda item: item.get("index", 0))
            vectors = [[float(x) for x in item["embedding"]] for item in ordered]
        except (KeyError, TypeError, ValueError) as exc:
            raise ProtocolError(f"malformed embedding response: {exc}") from exc
        if self.cache is not None:
            self.cache.put("embedding", cache_payload, vectors)
        return vectors


class HttpVerifierProvider(VerifierProvider):
    """POST {"claim", "evidence"} -> {"probability"}."""

    def __init__(
        self,
        url: str,
        api_key: str | None = None,
        cache: RequestCache | None = None,
        transport: HttpTransport | None = None,
        **transport_kwargs,
    ):
        self.url = url
        self.cache = cache
        self.transport = transport or HttpTransport(api_key=api_key, **transport_kwargs)
        self.identity = f"verifier:{self.url}"

    def score(self, claim: str, evidence: str) -> float:
        if not claim or not evidence:
            raise ValueError("claim and evidence must be nonempty")
        payload = {"claim": claim, "evidence": evidence}
        cache_payload = {"backend": self.identity, "request": payload}
        if self.cache is not None:
            hit = self.cache.get("verifier", cache_payload)
            if hit is not None:
                return float(hit)
        data = self.transport.post_json(self.url, payload)
        probability = data.get("probability") if isinstance(data, dict) else None
        if not isinstance(probability, (int, float)) or isinstance(probability, bool):
            raise ProtocolError(f"verifier response lacks a numeric probability: {data!r}")
        if self.cache is not None:
            self.cache.put("verifier", cache_payload, float(probability))
        return float(probability)


class HttpSearchProvider(SearchProvider):
    """POST {"query", "limit", "sites?"} -> [{"url", "title", "snippet"}]."""

    def __init__(
        self,
        url: str,
        api_key: str | None = None,
        cache: RequestCache | None = None,
        transport: HttpTransport | None = None,
        **transport_kwargs,
    ):
        self.url = url
        self.cache = cache
        self.transport = transport or HttpTransport(api_key=api_key, **transport_kwargs)
        self.identity = f"search:{self.url}"

    def search(self, query: str, limit: int, site_hints=None) -> list[SearchResult]:
        if not query:
            raise ValueError("query must be nonempty")
        if limit < 1:
            raise ValueError("limit must be at least 1")
        payload = {"query": query, "limit": limit}
        if site_hints:
            payload["sites"] = list(site_hints)
        cache_payload = {"backend": self.identity, "request": payload}
        raw = None
        if self.cache is not None:
            raw = self.cache.get("search", cache_payload)
        if raw is None:
            data = self.transport.post_json(self.url, payload)
            raw = data.get("results") if isinstance(data, dict) else data
            if not isinstance(raw, list):
                raise ProtocolError("search response is not a result list")
            if self.cache is not None:
                self.cache.put("search", cache_payload, raw)
        results = []
        for entry in raw[:limit]:
            if not isinstance(entry, dict) or not isinstance(entry.get("url"), str):
                raise ProtocolError(f"malformed search result entry: {entry!r}")
            results.append(
                SearchResult(
                    url=entry["url"],
                    title=str(entry.get("title", "")),
                    snippet=str(entry.get("snippet", "")),
                )
            )
        return results
