"""Benchmark loaders: native public formats in, BenchmarkItem lists out.

Formats handled:

    mmlu      subject CSVs, headerless rows of
              question, optA, optB, optC, optD, answer letter
    medqa     JSONL {question, options:{A:...}, answer_idx}   (also usmle)
    medmcqa   JSONL {id?, question, opa..opd, cop: 0-3, subject_name?}
    pubmedqa  JSONL {id?, question|QUESTION, contexts|CONTEXTS, final_decision}
              options are fixed to yes/no/maybe
    usmle     same record shape as medqa

A malformed row raises immediately with its file:line; silent repairs
would make accuracy comparisons meaningless.
"""

from __future__ import annotations

import csv
import logging
from dataclasses import dataclass
from pathlib import Path

from ..jsonlio import read_jsonl

log = logging.getLogger(__name__)

LETTERS = "ABCDEFGHIJ"


class BenchmarkFormatError(ValueError):
    pass


@dataclass
class BenchmarkItem:
    id: str
    question: str
    options: list[tuple[str, str]]  # (label, text), ordered
    gold_label: str
    context: str | None = None
    subject: str | None = None

    def validate(self) -> None:
        if len(self.options) < 2:
            raise BenchmarkFormatError(f"item {self.id}: fewer than 2 options")
        labels = [lb for lb, _ in self.options]
        if len(set(labels)) != len(labels):
            raise BenchmarkFormatError(f"item {self.id}: duplicate option labels")
        if self.gold_label not in labels:
            raise BenchmarkFormatError(
                f"item {self.id}: gold label {self.gold_label!r} not among "
                f"options {labels}"
            )
        if not self.question.strip():
            raise BenchmarkFormatError(f"item {self.id}: empty question")

    @property
    def gold_index(self) -> int:
        return [lb for lb, _ in self.options].index(self.gold_label)

    @property
    def gold_text(self) -> str:
        return dict(self.options)[self.gold_label]


def load_mmlu_csv(path: str | Path, subject: str | None = None) -> list[BenchmarkItem]:
    p = Path(path)
    subj = subject or p.stem.replace("_test", "").replace("_dev", "").replace("_val", "")
    items: list[BenchmarkItem] = []
    with open(p, encoding="utf-8", newline="") as f:
        for ln, row in enumerate(csv.reader(f), start=1):
            if not row:
                continue
            if len(row) != 6:
                raise BenchmarkFormatError(
                    f"{p}:{ln}: expected 6 columns, got {len(row)}"
                )
            question, a, b, c, d, answer = row
            answer = answer.strip().upper()
            if answer not in "ABCD" or len(answer) != 1:
                raise BenchmarkFormatError(f"{p}:{ln}: bad answer letter {answer!r}")
            item = BenchmarkItem(
                id=f"{subj}-{ln}",
                question=question,
                options=list(zip("ABCD", [a, b, c, d])),
                gold_label=answer,
                subject=subj,
            )
            item.validate()
            items.append(item)
    return items


def load_mmlu(path: str | Path) -> list[BenchmarkItem]:
    """A subject CSV, or a directory of them (sorted by filename)."""
    p = Path(path)
    if p.is_dir():
        items: list[BenchmarkItem] = []
        for f in sorted(p.glob("*.csv")):
            items.extend(load_mmlu_csv(f))
        if not items:
            raise BenchmarkFormatError(f"no CSV files under {p}")
        return items
    return load_mmlu_csv(p)


def _letter_options(p: Path, ln: int, raw: dict) -> list[tuple[str, str]]:
    if not isinstance(raw, dict) or not raw:
        raise BenchmarkFormatError(f"{p}:{ln}: options must be a non-empty object")
    return [(lb, str(raw[lb])) for lb in sorted(raw)]


def load_medqa(path: str | Path) -> list[BenchmarkItem]:
    p = Path(path)
    items: list[BenchmarkItem] = []
    for ln, rec in enumerate(read_jsonl(p), start=1):
        try:
            question = rec["question"]
            options = _letter_options(p, ln, rec["options"])
            gold = str(rec["answer_idx"]).strip()
        except KeyError as e:
            raise BenchmarkFormatError(f"{p}:{ln}: missing field {e}") from None
        item = BenchmarkItem(
            # synthetic ids carry the file stem so dev/test splits of the
            # same benchmark can never collide in the leak check
            id=str(rec.get("id", f"{p.stem}-{ln}")),
            question=str(question),
            options=options,
            gold_label=gold,
            subject=rec.get("meta_info"),
        )
        item.validate()
        items.append(item)
    return items


def load_medmcqa(path: str | Path) -> list[BenchmarkItem]:
    p = Path(path)
    items: list[BenchmarkItem] = []
    for ln, rec in enumerate(read_jsonl(p), start=1):
        try:
            opts = [str(rec["opa"]), str(rec["opb"]), str(rec["opc"]), str(rec["opd"])]
            cop = int(rec["cop"])
        except KeyError as e:
            raise BenchmarkFormatError(f"{p}:{ln}: missing field {e}") from None
        if not 0 <= cop <= 3:
            raise BenchmarkFormatError(f"{p}:{ln}: cop out of range: {cop}")
        item = BenchmarkItem(
            id=str(rec.get("id", f"{p.stem}-{ln}")),
            question=str(rec["question"]),
            options=list(zip("ABCD", opts)),
            gold_label="ABCD"[cop],
            subject=rec.get("subject_name"),
        )
        item.validate()
        items.append(item)
    return items


PUBMEDQA_OPTIONS = [("A", "yes"), ("B", "no"), ("C", "maybe")]


def load_pubmedqa(path: str | Path) -> list[BenchmarkItem]:
    p = Path(path)
    decision_to_label = {text: lb for lb, text in PUBMEDQA_OPTIONS}
    items: list[BenchmarkItem] = []
    for ln, rec in enumerate(read_jsonl(p), start=1):
        question = rec.get("question", rec.get("QUESTION"))
        contexts = rec.get("contexts", rec.get("CONTEXTS", []))
        decision = str(rec.get("final_decision", rec.get("gold", ""))).lower().strip()
        if question is None:
            raise BenchmarkFormatError(f"{p}:{ln}: missing question")
        if decision not in decision_to_label:
            raise BenchmarkFormatError(
                f"{p}:{ln}: final_decision must be yes/no/maybe, got {decision!r}"
            )
        if isinstance(contexts, str):
            contexts = [contexts]
        item = BenchmarkItem(
            id=str(rec.get("id", f"{p.stem}-{ln}")),
            question=str(question),
            options=list(PUBMEDQA_OPTIONS),
            gold_label=decision_to_label[decision],
            context="\n".join(str(c) for c in contexts) or None,
        )
        item.validate()
        items.append(item)
    return items


_LOADERS = {
    "mmlu": load_mmlu,
    "medqa": load_medqa,
    "medmcqa": load_medmcqa,
    "pubmedqa": load_pubmedqa,
    "usmle": load_medqa,
}

# published sizes, used only for count-mismatch warnings
EXPECTED_COUNTS = {("medqa", "train"): 10178}


def load_benchmark(
    name: str, path: str | Path, expected_count: int | None = None
) -> list[BenchmarkItem]:
    loader = _LOADERS.get(name)
    if loader is None:
        raise ValueError(
            f"unknown benchmark {name!r}; known: {', '.join(sorted(_LOADERS))}"
        )
    items = loader(path)
    if expected_count is not None and len(items) != expected_count:
        log.warning(
            "%s: loaded %d items but metadata says %d", name, len(items), expected_count
        )
    return items
