"""Reader for checksummed training-shard directories.

This package deliberately has no code dependency on the emitter; the contract
is the files themselves.  A shard directory holds:

  shards.json            manifest: {"shards": [{"file", "count", "checksum"}],
                         "config_hash", "seed", "total", "mask_policy"}
  shard-00000.jsonl ...  one JSON object per line:
                         {"tokens": [int], "mask": [0|1],
                          "source_ref": str, "provenance": str}

Checksums are sha256 hex digests of the shard file bytes.  Everything is
re-verified here, independently, before a single sample is handed to the
training loop: a corrupt shard must abort the run, not skew it.
"""

from __future__ import annotations

import hashlib
import json
from pathlib import Path
from typing import Iterator

MANIFEST_NAME = "shards.json"


class ShardError(RuntimeError):
    """Shard directory fails verification; training must not start."""


def _sha256_file(path: Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as f:
        for chunk in iter(lambda: f.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def load_manifest(shard_dir: str | Path) -> dict:
    path = Path(shard_dir) / MANIFEST_NAME
    try:
        manifest = json.loads(path.read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise ShardError(f"no shard manifest at {path}") from None
    except json.JSONDecodeError as e:
        raise ShardError(f"shard manifest {path} is not valid JSON: {e}") from None
    if not isinstance(manifest.get("shards"), list):
        raise ShardError(f"shard manifest {path} has no 'shards' list")
    return manifest


def manifest_hash(shard_dir: str | Path) -> str:
    """sha256 of the manifest file bytes, recorded in run manifests."""
    return _sha256_file(Path(shard_dir) / MANIFEST_NAME)


def verify(shard_dir: str | Path, manifest: dict | None = None) -> dict:
    """Re-hash every shard file against the manifest; raise on any drift."""
    root = Path(shard_dir)
    manifest = manifest if manifest is not None else load_manifest(root)
    for sh in manifest["shards"]:
        path = root / sh["file"]
        if not path.exists():
            raise ShardError(f"missing shard file {path}")
        actual = _sha256_file(path)
        if actual != sh["checksum"]:
            raise ShardError(
                f"checksum mismatch for {path}: manifest says "
                f"{sh['checksum'][:12]}…, file hashes to {actual[:12]}…"
            )
    return manifest


def _check_record(rec: dict, where: str) -> dict:
    tokens = rec.get("tokens")
    mask = rec.get("mask")
    if not isinstance(tokens, list) or not all(isinstance(t, int) for t in tokens):
        raise ShardError(f"{where}: 'tokens' must be a list of ints")
    if not isinstance(mask, list) or any(m not in (0, 1) for m in mask):
        raise ShardError(f"{where}: 'mask' must be a list of 0/1")
    if len(tokens) != len(mask):
        raise ShardError(
            f"{where}: tokens/mask length mismatch ({len(tokens)} vs {len(mask)})"
        )
    return rec


def iter_samples(shard_dir: str | Path, manifest: dict) -> Iterator[dict]:
    root = Path(shard_dir)
    for sh in manifest["shards"]:
        n = 0
        with open(root / sh["file"], encoding="utf-8") as f:
            for ln, line in enumerate(f, start=1):
                if not line.strip():
                    continue
                yield _check_record(json.loads(line), f"{sh['file']}:{ln}")
                n += 1
        if n != sh["count"]:
            raise ShardError(
                f"{sh['file']}: manifest says {sh['count']} samples, read {n}"
            )


def load_samples(shard_dir: str | Path) -> tuple[dict, list[dict]]:
    """Verify checksums, then load everything. The only entry point train uses."""
    manifest = verify(shard_dir)
    return manifest, list(iter_samples(shard_dir, manifest))
