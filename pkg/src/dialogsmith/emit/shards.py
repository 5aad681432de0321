"""Shard writing/reading with checksummed manifest.

Shards are line-delimited JSON, at most shard_size samples each, written
atomically; the manifest (written last, also atomically) records per-shard
counts and sha256 checksums.  Readers verify checksums before yielding
anything, so a flipped byte is caught up front instead of surfacing as a
weird training batch three hours in.
"""

from __future__ import annotations

import hashlib
import json
from pathlib import Path
from typing import Iterable, Iterator

from ..jsonlio import atomic_write_json, read_jsonl, write_jsonl
from .masking import TrainingSample

SHARD_MANIFEST_NAME = "shards.json"


class ShardIntegrityError(RuntimeError):
    pass


def _sha256_file(path: Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as f:
        for chunk in iter(lambda: f.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def write_shards(
    samples: Iterable[TrainingSample],
    out_dir: str | Path,
    shard_size: int,
    config_hash: str = "",
    seed: int | None = None,
) -> dict:
    if shard_size < 1:
        raise ValueError("shard_size must be ≥ 1")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)

    shards = []
    batch: list[TrainingSample] = []

    def flush() -> None:
        if not batch:
            return
        fname = f"shard-{len(shards):05d}.jsonl"
        path = out / fname
        write_jsonl(path, (s.as_record() for s in batch))
        shards.append(
            {"file": fname, "count": len(batch), "checksum": _sha256_file(path)}
        )
        batch.clear()

    for s in samples:
        batch.append(s)
        if len(batch) == shard_size:
            flush()
    flush()

    manifest = {
        "shards": shards,
        "config_hash": config_hash,
        "seed": seed,
        "total": sum(sh["count"] for sh in shards),
        "mask_policy": "assistant_content_and_eot",
    }
    atomic_write_json(out / SHARD_MANIFEST_NAME, manifest)
    return manifest


def load_shard_manifest(shard_dir: str | Path) -> dict:
    path = Path(shard_dir) / SHARD_MANIFEST_NAME
    try:
        return json.loads(path.read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise ShardIntegrityError(f"no shard manifest at {path}") from None
    except json.JSONDecodeError as e:
        raise ShardIntegrityError(f"shard manifest {path} is corrupt: {e}") from None


def verify_shards(shard_dir: str | Path, manifest: dict | None = None) -> dict:
    """Checksum every shard against the manifest; raises on any mismatch."""
    root = Path(shard_dir)
    manifest = manifest if manifest is not None else load_shard_manifest(root)
    for sh in manifest["shards"]:
        path = root / sh["file"]
        if not path.exists():
            raise ShardIntegrityError(f"missing shard file {path}")
        actual = _sha256_file(path)
        if actual != sh["checksum"]:
            raise ShardIntegrityError(
                f"checksum mismatch for {path}: manifest {sh['checksum'][:12]}…, "
                f"file {actual[:12]}…"
            )
    return manifest


def read_shards(
    shard_dir: str | Path, verify: bool = True
) -> Iterator[TrainingSample]:
    root = Path(shard_dir)
    manifest = load_shard_manifest(root)
    if verify:
        verify_shards(root, manifest)
    for sh in manifest["shards"]:
        n = 0
        for rec in read_jsonl(root / sh["file"]):
            yield TrainingSample.from_record(rec)
            n += 1
        if n != sh["count"]:
            raise ShardIntegrityError(
                f"{sh['file']}: manifest says {sh['count']} samples, read {n}"
            )
