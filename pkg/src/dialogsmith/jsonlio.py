"""Line-delimited JSON plumbing + atomic file writes.

Atomicity is the cheap POSIX kind: write to a temp file in the same
directory, fsync, rename over the target.  Good enough to guarantee that a
killed run never leaves a half-written manifest/checkpoint/cache entry.
"""

from __future__ import annotations

import json
import os
import tempfile
from pathlib import Path
from typing import Any, Iterable, Iterator

from .corpus.model import Dialogue, Turn


def atomic_write_text(path: str | Path, text: str) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as f:
            f.write(text)
            f.flush()
            os.fsync(f.fileno())
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise


def atomic_write_json(path: str | Path, obj: Any, indent: int | None = 2) -> None:
    atomic_write_text(path, json.dumps(obj, ensure_ascii=False, indent=indent) + "\n")


def write_jsonl(path: str | Path, records: Iterable[dict]) -> int:
    """Write records atomically; returns the number written."""
    lines = []
    for rec in records:
        lines.append(json.dumps(rec, ensure_ascii=False))
    atomic_write_text(path, "\n".join(lines) + ("\n" if lines else ""))
    return len(lines)


def read_jsonl(path: str | Path) -> Iterator[dict]:
    with open(path, encoding="utf-8") as f:
        for ln, line in enumerate(f, start=1):
            if not line.strip():
                continue
            try:
                yield json.loads(line)
            except json.JSONDecodeError as e:
                raise ValueError(f"{path}:{ln}: bad JSON line: {e.msg}") from None


# -- dialogue interchange ----------------------------------------------------

def dialogue_to_record(d: Dialogue) -> dict:
    rec: dict = {
        "id": d.id,
        "turns": [{"role": t.role, "text": t.text} for t in d.turns],
        "provenance": d.provenance,
        "flags": list(d.flags),
    }
    if d.source_doc is not None:
        rec["source_doc"] = d.source_doc
    if d.attempts != 1:
        rec["attempts"] = d.attempts
    if d.meta:
        rec["meta"] = d.meta
    return rec


def record_to_dialogue(rec: dict) -> Dialogue:
    return Dialogue(
        id=str(rec["id"]),
        turns=[Turn(role=t["role"], text=t["text"]) for t in rec["turns"]],
        provenance=rec.get("provenance", "sharegpt"),
        source_doc=rec.get("source_doc"),
        attempts=int(rec.get("attempts", 1)),
        flags=list(rec.get("flags", [])),
        meta=dict(rec.get("meta", {})),
    )


def write_dialogues(path: str | Path, dialogues: Iterable[Dialogue]) -> int:
    return write_jsonl(path, (dialogue_to_record(d) for d in dialogues))


def read_dialogues(path: str | Path) -> Iterator[Dialogue]:
    for rec in read_jsonl(path):
        yield record_to_dialogue(rec)
