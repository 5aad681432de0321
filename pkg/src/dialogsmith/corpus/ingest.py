"""Chat-log ingest: ShareGPT-style JSON -> clean Dialogue objects.

Raw exports wrap assistant turns in HTML (``<p>``, ``<code>``, entity
escapes) and use ``from``/``value`` keys with ``human``/``gpt`` roles.
Ingest normalizes that to the internal Turn model, strips markup while
keeping code block text, drops exact duplicates, and runs the QA gates,
keeping per-reason rejection counts for the run report.
"""

from __future__ import annotations

import hashlib
import json
import logging
from dataclasses import dataclass, field
from html.parser import HTMLParser
from pathlib import Path
from typing import Iterable, Iterator

from .degeneracy import DEFAULT_POLICY, DegeneracyPolicy, is_degenerate
from .language import LanguageDetector, default_detector
from .model import Dialogue, Document, Turn, squash_ws

log = logging.getLogger(__name__)

_ROLE_MAP = {
    "human": "user",
    "user": "user",
    "gpt": "assistant",
    "assistant": "assistant",
    "bing": "assistant",
    "chatgpt": "assistant",
    "system": "system",
}

_SKIP_ELEMENTS = {"script", "style"}
_BLOCK_ELEMENTS = {"p", "div", "pre", "li", "ul", "ol", "br", "tr", "table", "blockquote", "h1", "h2", "h3", "h4"}


class _TextExtractor(HTMLParser):
    def __init__(self):
        super().__init__(convert_charrefs=True)
        self.chunks: list[str] = []
        self._skip_depth = 0

    def handle_starttag(self, tag, attrs):
        if tag in _SKIP_ELEMENTS:
            self._skip_depth += 1
        elif tag in _BLOCK_ELEMENTS:
            self.chunks.append("\n")

    def handle_endtag(self, tag):
        if tag in _SKIP_ELEMENTS and self._skip_depth:
            self._skip_depth -= 1
        elif tag in _BLOCK_ELEMENTS:
            self.chunks.append("\n")

    def handle_data(self, data):
        if not self._skip_depth:
            self.chunks.append(data)


def strip_html(text: str) -> str:
    """Drop tags and unescape entities; block-level tags become newlines."""
    if "<" not in text and "&" not in text:
        return text
    p = _TextExtractor()
    p.feed(text)
    p.close()
    out = "".join(p.chunks)
    # collapse the newline soup block tags leave behind
    lines = [ln.rstrip() for ln in out.splitlines()]
    cleaned: list[str] = []
    for ln in lines:
        if ln or (cleaned and cleaned[-1]):
            cleaned.append(ln)
    return "\n".join(cleaned).strip()


def content_fingerprint(dlg: Dialogue) -> str:
    """Hash of role-tagged, whitespace-normalized, casefolded turn text."""
    blob = "\x1e".join(f"{t.role}\x1f{squash_ws(t.text).casefold()}" for t in dlg.turns)
    return hashlib.sha256(blob.encode("utf-8")).hexdigest()


def parse_sharegpt_record(rec: dict, fallback_id: str) -> Dialogue | None:
    """One raw export record -> Dialogue, or None if it has no usable turns."""
    convs = rec.get("conversations")
    if not isinstance(convs, list):
        return None
    turns: list[Turn] = []
    for msg in convs:
        if not isinstance(msg, dict):
            continue
        role = _ROLE_MAP.get(str(msg.get("from", "")).lower())
        if role is None:
            continue
        text = strip_html(str(msg.get("value", "")))
        turns.append(Turn(role=role, text=text))
    if not turns:
        return None
    return Dialogue(id=str(rec.get("id") or fallback_id), turns=turns)


def load_sharegpt(path: str | Path) -> Iterator[Dialogue]:
    """Reads either a JSON array file or JSONL, one record per dialogue."""
    p = Path(path)
    raw = p.read_text(encoding="utf-8")
    head = raw.lstrip()[:1]
    if head == "[":
        records = json.loads(raw)
    else:
        records = (json.loads(ln) for ln in raw.splitlines() if ln.strip())
    for i, rec in enumerate(records):
        dlg = parse_sharegpt_record(rec, fallback_id=f"{p.stem}-{i}")
        if dlg is not None:
            yield dlg


@dataclass
class IngestSkip:
    unit: str
    reason: str


def ingest_documents(
    paths: Iterable[str | Path],
    fmt: str = "structured_record",
    skips: list[IngestSkip] | None = None,
) -> Iterator[Document]:
    """Yield Documents from text trees or JSONL record files.

    fmt "plain_text": every *.txt under each path becomes one generic
    document (file stem as id/title).  fmt "structured_record": each line is
    a JSON object {id, title, body, year, source}.  Units that fail the
    Document invariants are appended to `skips` with a reason instead of
    being silently dropped; unreadable paths raise.
    """
    if fmt not in ("plain_text", "structured_record"):
        raise ValueError(f"unknown ingest format {fmt!r}")
    sink = skips if skips is not None else []
    for path in paths:
        p = Path(path)
        if not p.exists():
            raise FileNotFoundError(f"ingest path does not exist: {p}")
        if fmt == "plain_text":
            files = sorted(p.rglob("*.txt")) if p.is_dir() else [p]
            for f in files:
                body = f.read_text(encoding="utf-8")
                doc = Document(
                    id=f.stem, source="generic", title=f.stem, body=body
                )
                probs = doc.violations()
                if probs:
                    sink.append(IngestSkip(unit=str(f), reason=probs[0]))
                    continue
                yield doc
        else:
            for ln, line in enumerate(
                p.read_text(encoding="utf-8").splitlines(), start=1
            ):
                if not line.strip():
                    continue
                unit = f"{p}:{ln}"
                try:
                    rec = json.loads(line)
                except json.JSONDecodeError as e:
                    sink.append(IngestSkip(unit=unit, reason=f"bad json: {e.msg}"))
                    continue
                if not isinstance(rec, dict):
                    sink.append(IngestSkip(unit=unit, reason="record is not an object"))
                    continue
                doc = Document(
                    id=str(rec.get("id", "")),
                    source=str(rec.get("source", "generic")),
                    title=str(rec.get("title", "")),
                    body=str(rec.get("body", "")),
                    year=rec.get("year"),
                    meta={k: str(v) for k, v in rec.get("meta", {}).items()},
                )
                probs = doc.violations()
                if probs:
                    sink.append(IngestSkip(unit=unit, reason=probs[0]))
                    continue
                yield doc


@dataclass
class FilterStats:
    """Funnel counts for an ingest run."""

    seen: int = 0
    kept: int = 0
    duplicates: int = 0
    rejected: int = 0
    reject_reasons: dict = field(default_factory=dict)

    def note_rejection(self, reasons: list[str]) -> None:
        self.rejected += 1
        for r in reasons:
            self.reject_reasons[r] = self.reject_reasons.get(r, 0) + 1

    def as_dict(self) -> dict:
        return {
            "seen": self.seen,
            "kept": self.kept,
            "duplicates": self.duplicates,
            "rejected": self.rejected,
            "reject_reasons": dict(sorted(self.reject_reasons.items())),
        }


def filter_dialogues(
    dialogues: Iterable[Dialogue],
    detector: LanguageDetector | None = None,
    require_english: bool = True,
    english_confidence: float = 0.8,
    policy: DegeneracyPolicy = DEFAULT_POLICY,
) -> tuple[list[Dialogue], FilterStats]:
    """Dedup -> language gate -> degeneracy gates.

    Duplicates are counted apart from QA rejections so the funnel in the run
    report adds up: seen == kept + duplicates + rejected.  The gates are pure
    predicates, so running the survivors through again changes nothing.
    """
    stats = FilterStats()
    seen_hashes: set[str] = set()
    kept: list[Dialogue] = []
    for dlg in dialogues:
        stats.seen += 1
        fp = content_fingerprint(dlg)
        if fp in seen_hashes:
            stats.duplicates += 1
            continue
        seen_hashes.add(fp)

        reasons: list[str] = []
        if require_english:
            det = detector if detector is not None else default_detector()
            try:
                lang, conf = det.detect(dlg.text_blob())
            except ValueError:
                lang, conf = "", 0.0
            if lang != "en" or conf < english_confidence:
                reasons.append("non_english")
        bad, tags = is_degenerate(dlg, policy)
        if bad:
            reasons.extend(tags)

        if reasons:
            stats.note_rejection(reasons)
            continue
        kept.append(dlg)
        stats.kept += 1
    log.info(
        "ingest funnel: %d seen, %d kept, %d dup, %d rejected",
        stats.seen, stats.kept, stats.duplicates, stats.rejected,
    )
    return kept, stats
