"""Small text helpers shared by selection, scoring, and provider code."""

from __future__ import annotations

import json
import re

from .errors import SchemaError

# Alphanumeric runs (unicode-aware, underscore excluded).
_TOKEN_RE = re.compile(r"[^\W_]+", re.UNICODE)

_FENCE_RE = re.compile(r"^```(?:[a-zA-Z0-9_-]+)?\s*(.*?)\s*```\s*$", re.DOTALL)


def token_list(text: str) -> list[str]:
    """Lowercased alphanumeric tokens in order, repeats kept."""
    return _TOKEN_RE.findall(text.lower())


def token_set(text: str) -> set[str]:
    return set(token_list(text))


def normalize_ws(text: str) -> str:
    """Collapse whitespace runs to single spaces and strip the ends."""
    return " ".join(text.split())


def extract_json_object(raw: str) -> dict:
    """Parse a model response as a single JSON object.

    Tolerates a surrounding markdown code fence; anything else that is
    not a JSON object raises SchemaError.
    """
    if not isinstance(raw, str):
        raise SchemaError("response is not text")
    text = raw.strip()
    fenced = _FENCE_RE.match(text)
    if fenced:
        text = fenced.group(1)
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"response is not valid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise SchemaError("response JSON is not an object")
    return data
