"""Document -> dialogue generation loop with a resumable on-disk manifest.

Each document yields up to n_dialogues_per_doc accepted dialogues; a slot
whose parse/validation keeps failing for max_attempts consecutive tries is
abandoned and counted rejected.  Progress checkpoints after every document:
per-document dialogue files are written atomically, then the manifest.
Killing the run at any point loses at most the in-flight document, and a
re-run skips everything the manifest already records.
"""

from __future__ import annotations

import hashlib
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable

from ..client.base import ChatRequest
from ..corpus.model import Dialogue, Document, Turn, PROVENANCE_DBKE
from ..jsonlio import atomic_write_json, read_dialogues, write_dialogues
from .parsing import ParseError, parse_dialogue
from .templates import PromptTemplate
from .validation import ValidationPolicy, count_exchanges, validate_dialogue

log = logging.getLogger(__name__)

MANIFEST_NAME = "manifest.json"
MANIFEST_VERSION = 1


class CheckpointError(RuntimeError):
    """Manifest exists but cannot be trusted; resume refused."""


@dataclass
class GenerationParams:
    temperature: float = 0.7
    max_output_tokens: int = 1024
    n_dialogues_per_doc: int = 5
    max_attempts: int = 3
    seed: int = 0

    def validate(self) -> None:
        if self.temperature < 0:
            raise ValueError("temperature must be ≥ 0")
        if self.n_dialogues_per_doc < 1:
            raise ValueError("n_dialogues_per_doc must be ≥ 1")
        if self.max_attempts < 1:
            raise ValueError("max_attempts must be ≥ 1")


@dataclass
class TransformResult:
    doc_id: str
    accepted: list[Dialogue]
    rejected_slots: int
    attempts_total: int


def _slot_seed(base_seed: int, doc_id: str, slot: int, attempt: int) -> int:
    """Stable per-(doc, slot, attempt) seed so sampling variation across the
    n dialogues of a document survives resume and reordering."""
    h = hashlib.sha256(f"{base_seed}:{doc_id}:{slot}:{attempt}".encode()).digest()
    return int.from_bytes(h[:4], "big")


def transform_document(
    doc: Document,
    template: PromptTemplate,
    teacher,
    params: GenerationParams,
    policy: ValidationPolicy | None = None,
) -> TransformResult:
    """Teacher must expose chat_complete(ChatRequest) -> ChatResponse."""
    params.validate()
    probs = doc.violations()
    if probs:
        raise ValueError(f"document {doc.id} invalid: {', '.join(probs)}")
    passage = f"{doc.title}\n\n{doc.body}" if doc.title else doc.body
    prompt = template.render(passage)

    accepted: list[Dialogue] = []
    rejected = 0
    attempts_total = 0
    for slot in range(params.n_dialogues_per_doc):
        dialogue = None
        for attempt in range(1, params.max_attempts + 1):
            attempts_total += 1
            req = ChatRequest(
                messages=[Turn(role="user", text=prompt)],
                temperature=params.temperature,
                max_output_tokens=params.max_output_tokens,
                seed=_slot_seed(params.seed, doc.id, slot, attempt),
            )
            resp = teacher.chat_complete(req)
            try:
                cand = parse_dialogue(
                    resp.text, template.aliases, dialogue_id=f"{doc.id}-d{slot}"
                )
            except ParseError as e:
                log.debug("doc %s slot %d attempt %d: %s", doc.id, slot, attempt, e)
                continue
            tags = validate_dialogue(cand, policy)
            if tags:
                log.debug(
                    "doc %s slot %d attempt %d rejected: %s",
                    doc.id, slot, attempt, ",".join(tags),
                )
                continue
            cand.provenance = PROVENANCE_DBKE
            cand.source_doc = doc.id
            cand.attempts = attempt
            dialogue = cand
            break
        if dialogue is None:
            rejected += 1
        else:
            accepted.append(dialogue)
    return TransformResult(
        doc_id=doc.id,
        accepted=accepted,
        rejected_slots=rejected,
        attempts_total=attempts_total,
    )


@dataclass
class DatasetManifest:
    run_id: str
    config_hash: str
    documents_in: int = 0
    accepted: int = 0
    rejected: int = 0
    retried: int = 0
    total_exchanges: int = 0
    per_document: dict = field(default_factory=dict)

    @property
    def generated(self) -> int:
        return self.accepted + self.rejected

    def achieved_avg_exchanges(self) -> float:
        return self.total_exchanges / self.accepted if self.accepted else 0.0

    def record(self, result: TransformResult, exchanges: int) -> None:
        self.documents_in += 1
        self.accepted += len(result.accepted)
        self.rejected += result.rejected_slots
        slots = len(result.accepted) + result.rejected_slots
        self.retried += result.attempts_total - slots
        self.total_exchanges += exchanges
        self.per_document[result.doc_id] = {
            "accepted_ids": [d.id for d in result.accepted],
            "rejected_slots": result.rejected_slots,
            "attempts_total": result.attempts_total,
        }

    def check_consistency(self) -> None:
        acc = sum(len(rec["accepted_ids"]) for rec in self.per_document.values())
        rej = sum(rec["rejected_slots"] for rec in self.per_document.values())
        if acc != self.accepted or rej != self.rejected:
            raise CheckpointError(
                f"manifest totals ({self.accepted}/{self.rejected}) disagree "
                f"with per-document records ({acc}/{rej})"
            )

    def as_dict(self) -> dict:
        return {
            "version": MANIFEST_VERSION,
            "run_id": self.run_id,
            "config_hash": self.config_hash,
            "counts": {
                "documents_in": self.documents_in,
                "generated": self.generated,
                "accepted": self.accepted,
                "rejected": self.rejected,
                "retried": self.retried,
            },
            "achieved_avg_exchanges": round(self.achieved_avg_exchanges(), 3),
            "total_exchanges": self.total_exchanges,
            "per_document": self.per_document,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "DatasetManifest":
        try:
            counts = d["counts"]
            m = cls(
                run_id=d["run_id"],
                config_hash=d["config_hash"],
                documents_in=counts["documents_in"],
                accepted=counts["accepted"],
                rejected=counts["rejected"],
                retried=counts["retried"],
                total_exchanges=d.get("total_exchanges", 0),
                per_document=d["per_document"],
            )
        except (KeyError, TypeError) as e:
            raise CheckpointError(f"manifest missing field: {e}") from None
        m.check_consistency()
        return m


def load_manifest(out_dir: str | Path) -> DatasetManifest | None:
    path = Path(out_dir) / MANIFEST_NAME
    if not path.exists():
        return None
    import json

    try:
        return DatasetManifest.from_dict(json.loads(path.read_text(encoding="utf-8")))
    except (json.JSONDecodeError, CheckpointError) as e:
        raise CheckpointError(
            f"checkpoint at {path} is corrupt ({e}); re-run with an explicit "
            "restart to discard it"
        ) from None


def run_pipeline(
    docs: Iterable[Document],
    template: PromptTemplate,
    teacher,
    params: GenerationParams,
    out_dir: str | Path,
    config_hash: str,
    run_id: str = "dbke",
    policy: ValidationPolicy | None = None,
    restart: bool = False,
) -> DatasetManifest:
    """Transform every document, checkpointing after each one.

    Sequential by design: the model client handles request-level
    concurrency, and a single writer keeps the manifest trivially
    consistent.  Documents already present in the manifest are skipped, so
    re-running a finished run performs zero teacher calls.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    docs_dir = out / "docs"
    docs_dir.mkdir(exist_ok=True)

    manifest = None
    if restart:
        (out / MANIFEST_NAME).unlink(missing_ok=True)
    else:
        manifest = load_manifest(out)
        if manifest is not None and manifest.config_hash != config_hash:
            raise CheckpointError(
                "existing manifest was produced by a different config "
                f"(hash {manifest.config_hash[:12]}… vs {config_hash[:12]}…); "
                "use restart to discard it"
            )
    if manifest is None:
        manifest = DatasetManifest(run_id=run_id, config_hash=config_hash)

    for doc in docs:
        if doc.id in manifest.per_document:
            continue
        result = transform_document(doc, template, teacher, params, policy)
        write_dialogues(docs_dir / f"{doc.id}.jsonl", result.accepted)
        exchanges = sum(count_exchanges(d) for d in result.accepted)
        manifest.record(result, exchanges)
        atomic_write_json(out / MANIFEST_NAME, manifest.as_dict())
        log.info(
            "doc %s: %d accepted, %d rejected",
            doc.id, len(result.accepted), result.rejected_slots,
        )
    manifest.check_consistency()
    atomic_write_json(out / MANIFEST_NAME, manifest.as_dict())
    return manifest


def collect_dialogues(out_dir: str | Path, manifest: DatasetManifest):
    """Accepted dialogues in manifest (= input) document order."""
    docs_dir = Path(out_dir) / "docs"
    for doc_id in manifest.per_document:
        path = docs_dir / f"{doc_id}.jsonl"
        if not path.exists():
            if manifest.per_document[doc_id]["accepted_ids"]:
                raise CheckpointError(f"manifest lists {doc_id} but {path} is missing")
            continue
        yield from read_dialogues(path)
