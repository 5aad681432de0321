"""Core data units: source documents, chat turns, dialogues.

Invariant checks live on the types as ``violations()`` methods returning a
list of human-readable problems (empty list == valid).  Constructors stay
permissive on purpose: segmentation and streaming ingest both need to hold
partially-formed objects, so enforcement happens at pipeline acceptance
points, not in ``__init__``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

ROLES = ("system", "user", "assistant")

# Document sources the pipeline understands.  clinical_article carries the
# publication-year cutoff; generic documents are exempt.
SOURCE_CLINICAL = "clinical_article"
SOURCE_GENERIC = "generic"

# Dialogue provenance values used in the JSONL interchange format.
PROVENANCE_SHAREGPT = "sharegpt"
PROVENANCE_DBKE = "dbke"
PROVENANCE_QA = "qa_transform"
PROVENANCES = (PROVENANCE_SHAREGPT, PROVENANCE_DBKE, PROVENANCE_QA)

# Newest publication year admitted for clinical articles.  Keeps synthesized
# training data behind the knowledge cutoff of the models being compared.
CLINICAL_YEAR_CUTOFF = 2020

_WS_RE = re.compile(r"\s+")


def squash_ws(text: str) -> str:
    """Collapse runs of whitespace to single spaces and strip the ends."""
    return _WS_RE.sub(" ", text).strip()


@dataclass
class Document:
    """A dense source document destined for dialogue transformation."""

    id: str
    source: str
    title: str
    body: str
    year: int | None = None
    meta: dict = field(default_factory=dict)

    def violations(self) -> list[str]:
        """Short tags, usable directly as skip/rejection counter keys."""
        probs = []
        if not self.id:
            probs.append("empty_id")
        if self.source not in (SOURCE_CLINICAL, SOURCE_GENERIC):
            probs.append("unknown_source")
        if not squash_ws(self.body):
            probs.append("empty_body")
        if self.source == SOURCE_CLINICAL:
            if self.year is None:
                probs.append("missing_year")
            elif self.year > CLINICAL_YEAR_CUTOFF:
                probs.append("year_past_cutoff")
        return probs


@dataclass
class Turn:
    """One utterance in a conversation."""

    role: str
    text: str

    def violations(self) -> list[str]:
        probs = []
        if self.role not in ROLES:
            probs.append(f"unknown role {self.role!r}")
        if not self.text.strip():
            probs.append(f"{self.role} turn has empty text")
        return probs


@dataclass
class Dialogue:
    """An ordered conversation, optionally tied back to a source document.

    ``attempts`` records how many teacher calls it took to produce an
    accepted dialogue (1 for ingested data); ``flags`` carries audit marks
    like ``truncated``.
    """

    id: str
    turns: list[Turn]
    provenance: str = PROVENANCE_SHAREGPT
    source_doc: str | None = None
    attempts: int = 1
    flags: list[str] = field(default_factory=list)
    meta: dict = field(default_factory=dict)

    def non_system_turns(self) -> list[Turn]:
        return [t for t in self.turns if t.role != "system"]

    def text_blob(self) -> str:
        """All turn text joined; handy for language / degeneracy checks."""
        return "\n".join(t.text for t in self.turns)

    def violations(self) -> list[str]:
        """Structural checks for a *complete* conversation.

        A valid dialogue has at most one system turn (first), then strictly
        alternating user/assistant starting with user, and at least one
        user+assistant exchange.
        """
        probs = []
        if not self.id:
            probs.append("dialogue id is empty")
        if self.provenance not in PROVENANCES:
            probs.append(f"unknown provenance {self.provenance!r}")
        for i, t in enumerate(self.turns):
            probs.extend(f"turn {i}: {p}" for p in t.violations())
            if t.role == "system" and i != 0:
                probs.append(f"turn {i}: system turn not at position 0")
        convo = self.non_system_turns()
        if len(convo) < 2:
            probs.append("fewer than two non-system turns")
        expected = "user"
        for i, t in enumerate(convo):
            if t.role != expected:
                probs.append(
                    f"non-system turn {i}: expected {expected}, got {t.role}"
                )
                break
            expected = "assistant" if expected == "user" else "user"
        return probs
