"""Content-addressed response cache.

Key = sha256 over (endpoint, operation, canonical request JSON); value =
the raw response body bytes, exactly as first received.  Entries are
written atomically so a killed run can never leave a truncated file, and a
corrupt entry downgrades to a miss with a warning rather than poisoning
the run.
"""

from __future__ import annotations

import hashlib
import json
import logging
from pathlib import Path

from ..jsonlio import atomic_write_text

log = logging.getLogger(__name__)


def cache_key(endpoint: str, op: str, payload: dict) -> str:
    canon = json.dumps(
        {"endpoint": endpoint, "op": op, "request": payload},
        sort_keys=True,
        ensure_ascii=False,
        separators=(",", ":"),
    )
    return hashlib.sha256(canon.encode("utf-8")).hexdigest()


class ResponseCache:
    def __init__(self, root: str | Path):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)

    def _path(self, key: str) -> Path:
        return self.root / key[:2] / f"{key}.json"

    def get(self, key: str) -> bytes | None:
        p = self._path(key)
        try:
            raw = p.read_bytes()
        except FileNotFoundError:
            return None
        except OSError as e:
            log.warning("cache read failed for %s: %s", key, e)
            return None
        try:
            json.loads(raw.decode("utf-8"))
        except (UnicodeDecodeError, json.JSONDecodeError):
            log.warning("cache entry %s is corrupt; treating as miss", key)
            return None
        return raw

    def put(self, key: str, body: bytes) -> None:
        atomic_write_text(self._path(key), body.decode("utf-8"))
