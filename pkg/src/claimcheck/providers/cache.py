"""Persistent request cache shared by the HTTP backends.

One file per key; writes go through a temp file and an atomic rename, so
concurrent writers of the same key leave a readable entry either way.
Corrupt entries are evicted and treated as misses.
"""

from __future__ import annotations

import hashlib
import json
import logging
import os
import time
import uuid
from pathlib import Path
from typing import Any

logger = logging.getLogger(__name__)


def _normalize(value: Any) -> Any:
    # whitespace in free text must not split cache keys
    if isinstance(value, str):
        return " ".join(value.split())
    if isinstance(value, dict):
        return {k: _normalize(v) for k, v in sorted(value.items())}
    if isinstance(value, (list, tuple)):
        return [_normalize(v) for v in value]
    return value


def canonical_key(kind: str, payload: Any) -> str:
    """Content hash of the canonicalized request; equal requests collide."""
    canonical = json.dumps(
        {"kind": kind, "payload": _normalize(payload)},
        sort_keys=True,
        separators=(",", ":"),
        ensure_ascii=False,
    )
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


class RequestCache:
    def __init__(self, directory):
        self.directory = Path(directory)
        self.directory.mkdir(parents=True, exist_ok=True)

    def _path(self, kind: str, payload: Any) -> Path:
        return self.directory / f"{kind}-{canonical_key(kind, payload)}.json"

    def get(self, kind: str, payload: Any):
        """Stored response for the request, or None on a miss."""
        path = self._path(kind, payload)
        try:
            with open(path, encoding="utf-8") as fh:
                entry = json.load(fh)
            return entry["response"]
        except FileNotFoundError:
            return None
        except (json.JSONDecodeError, KeyError, OSError) as exc:
            logger.warning("evicting corrupt cache entry %s: %s", path.name, exc)
            try:
                path.unlink()
            except OSError:
                pass
            return None

    def put(self, kind: str, payload: Any, response: Any) -> None:
        path = self._path(kind, payload)
        tmp = path.with_name(f"{path.name}.{uuid.uuid4().hex}.tmp")
        entry = {"response": response, "created_at": time.time()}
        with open(tmp, "w", encoding="utf-8") as fh:
            json.dump(entry, fh, ensure_ascii=False)
        os.replace(tmp, path)
