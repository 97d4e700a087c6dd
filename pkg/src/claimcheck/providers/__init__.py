"""Provider contracts, offline test backends, HTTP backends, and the request cache."""

from .base import (
    DEFAULT_INFLIGHT_LIMIT,
    ChatProvider,
    EmbeddingProvider,
    SearchProvider,
    VerifierProvider,
    inflight_slot,
    set_inflight_limit,
)
from .cache import RequestCache, canonical_key
from .http import (
    HttpChatProvider,
    HttpEmbeddingProvider,
    HttpSearchProvider,
    HttpTransport,
    HttpVerifierProvider,
)
from .offline import (
    FixtureSearchProvider,
    HashEmbeddingProvider,
    LexicalVerifierProvider,
    ScriptedChatProvider,
    prompt_digest,
)

__all__ = [
    "DEFAULT_INFLIGHT_LIMIT",
    "ChatProvider",
    "EmbeddingProvider",
    "SearchProvider",
    "VerifierProvider",
    "inflight_slot",
    "set_inflight_limit",
    "RequestCache",
    "canonical_key",
    "HttpChatProvider",
    "HttpEmbeddingProvider",
    "HttpSearchProvider",
    "HttpTransport",
    "HttpVerifierProvider",
    "FixtureSearchProvider",
    "HashEmbeddingProvider",
    "LexicalVerifierProvider",
    "ScriptedChatProvider",
    "prompt_digest",
]
