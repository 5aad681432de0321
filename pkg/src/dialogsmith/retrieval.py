"""BM25 retrieval over the document corpus + QA justification dialogues.

The index is a plain in-memory inverted file; scoring is the classic
Okapi form with the idf floored at zero so no term can penalize a match:

    idf(t)  = max(0, ln((N - df + 0.5) / (df + 0.5)))
    s(d, q) = Σ_t idf(t) · tf·(k1+1) / (tf + k1·(1 - b + b·len(d)/avg_len))

Ranking ties break toward the ascending document id so results are stable
under corpus insertion order.  qa_to_dialogue turns a multiple-choice item
plus retrieved articles into a tutoring dialogue whose final assistant
turn must name the gold option; failing that, the teacher is re-asked up
to max_attempts before the item is recorded rejected.
"""

from __future__ import annotations

import hashlib
import logging
import math
import random
import re
from dataclasses import dataclass, field

from .client.base import ChatRequest
from .corpus.model import Dialogue, Document, Turn, PROVENANCE_QA
from .dbke.parsing import ParseError, parse_dialogue
from .dbke.templates import PromptTemplate
from .evalharness.benchmarks import BenchmarkItem

log = logging.getLogger(__name__)

K1 = 1.5
B = 0.75
DEFAULT_PASSAGES = 3

_TERM_RE = re.compile(r"[a-z0-9]+")


def tokenize_terms(text: str) -> list[str]:
    return _TERM_RE.findall(text.lower())


@dataclass
class RetrievalIndex:
    postings: dict = field(default_factory=dict)  # term -> list[(doc_id, tf)]
    doc_lengths: dict = field(default_factory=dict)  # doc_id -> token count
    avg_len: float = 0.0
    n_docs: int = 0

    def idf(self, term: str) -> float:
        df = len(self.postings.get(term, ()))
        return max(0.0, math.log((self.n_docs - df + 0.5) / (df + 0.5)))


def build_index(docs: list[Document]) -> RetrievalIndex:
    if not docs:
        raise ValueError("empty_corpus")
    ix = RetrievalIndex()
    for doc in docs:
        terms = tokenize_terms(f"{doc.title} {doc.body}")
        ix.doc_lengths[doc.id] = len(terms)
        counts: dict = {}
        for t in terms:
            counts[t] = counts.get(t, 0) + 1
        for t, tf in counts.items():
            ix.postings.setdefault(t, []).append((doc.id, tf))
    for plist in ix.postings.values():
        plist.sort()
    ix.n_docs = len(ix.doc_lengths)
    ix.avg_len = sum(ix.doc_lengths.values()) / ix.n_docs
    return ix


def retrieve(ix: RetrievalIndex, query: str, k: int) -> list[tuple[str, float]]:
    """Top-k (doc id, score), score-descending then id-ascending.

    Zero-score documents (all their matched terms idf-floored) are not
    reported; with k=0 the result is empty.
    """
    if k < 0:
        raise ValueError("k must be ≥ 0")
    if k == 0:
        return []
    scores: dict = {}
    for term in tokenize_terms(query):
        idf = ix.idf(term)
        if idf == 0.0:
            continue
        for doc_id, tf in ix.postings.get(term, ()):
            dl = ix.doc_lengths[doc_id]
            denom = tf + K1 * (1 - B + B * dl / ix.avg_len)
            scores[doc_id] = scores.get(doc_id, 0.0) + idf * tf * (K1 + 1) / denom
    ranked = sorted(
        ((d, s) for d, s in scores.items() if s > 0.0),
        key=lambda ds: (-ds[1], ds[0]),
    )
    return ranked[:k]


def sample_items(pool: list[BenchmarkItem], n: int, seed: int) -> list[BenchmarkItem]:
    """Seeded sampling without replacement; n = len(pool) permutes the pool."""
    if n > len(pool):
        raise ValueError(f"cannot sample {n} items from a pool of {len(pool)}")
    return random.Random(seed).sample(pool, n)


def _qa_passage_block(
    item: BenchmarkItem, passages: list[str], max_passage_chars: int = 4000
) -> str:
    lines = [f"Question: {item.question}"]
    for label, text in item.options:
        lines.append(f"{label}. {text}")
    lines.append(f"Correct answer: ({item.gold_label}) {item.gold_text}")
    if passages:
        lines.append("")
        lines.append("Reference articles:")
        for i, p in enumerate(passages, start=1):
            lines.append(f"[{i}] {p[:max_passage_chars]}")
    return "\n".join(lines)


def _slot_seed(seed: int, item_id: str, attempt: int) -> int:
    h = hashlib.sha256(f"{seed}:{item_id}:{attempt}".encode()).digest()
    return int.from_bytes(h[:4], "big")


class QARejected(RuntimeError):
    def __init__(self, item_id: str, attempts: int):
        super().__init__(
            f"item {item_id}: teacher never produced the gold label in its "
            f"final turn after {attempts} attempts"
        )
        self.item_id = item_id
        self.attempts = attempts


def qa_to_dialogue(
    item: BenchmarkItem,
    passages: list[str],
    teacher,
    template: PromptTemplate,
    max_attempts: int = 3,
    temperature: float = 0.7,
    max_output_tokens: int = 1024,
    seed: int = 0,
) -> Dialogue:
    """Raises QARejected when every attempt fails the grounding check.

    The grounding check is deliberately dumb: the final assistant turn must
    contain the rendered gold label token, e.g. "C)".  Cheap, deterministic,
    and errs toward regeneration.
    """
    item.validate()
    if not passages:
        log.warning("item %s: transforming with zero retrieved passages", item.id)
    prompt = template.render(_qa_passage_block(item, passages))
    needle = f"{item.gold_label})"

    for attempt in range(1, max_attempts + 1):
        resp = teacher.chat_complete(
            ChatRequest(
                messages=[Turn(role="user", text=prompt)],
                temperature=temperature,
                max_output_tokens=max_output_tokens,
                seed=_slot_seed(seed, item.id, attempt),
            )
        )
        try:
            d = parse_dialogue(resp.text, template.aliases, dialogue_id=f"qa-{item.id}")
        except ParseError as e:
            log.debug("item %s attempt %d: %s", item.id, attempt, e)
            continue
        final_assistant = next(
            (t for t in reversed(d.turns) if t.role == "assistant"), None
        )
        if final_assistant is None or needle not in final_assistant.text:
            log.debug(
                "item %s attempt %d: gold label %s missing from final turn",
                item.id, attempt, needle,
            )
            continue
        d.provenance = PROVENANCE_QA
        d.source_doc = item.id
        d.attempts = attempt
        return d
    raise QARejected(item.id, max_attempts)


@dataclass
class QABatchResult:
    accepted: list[Dialogue]
    rejected_ids: list[str]


def qa_batch(
    items: list[BenchmarkItem],
    ix: RetrievalIndex | None,
    docs_by_id: dict,
    teacher,
    template: PromptTemplate,
    k_passages: int = DEFAULT_PASSAGES,
    **kwargs,
) -> QABatchResult:
    """Retrieve-then-transform over a sampled item list."""
    accepted: list[Dialogue] = []
    rejected: list[str] = []
    for item in items:
        passages: list[str] = []
        if ix is not None:
            query = item.question + " " + " ".join(t for _, t in item.options)
            for doc_id, _score in retrieve(ix, query, k_passages):
                passages.append(docs_by_id[doc_id].body)
        try:
            accepted.append(
                qa_to_dialogue(item, passages, teacher, template, **kwargs)
            )
        except QARejected:
            rejected.append(item.id)
    return QABatchResult(accepted=accepted, rejected_ids=rejected)
