"""Tokenized training samples with user-input loss masks.

mask[i] is True exactly when token i should contribute to training loss:
its character span intersects an assistant turn's content or that turn's
end-of-turn delimiter.  Role headers, system/user turns, and any other
scaffolding stay False.  Overlong samples are right-truncated; if the cut
removes every learnable token the sample is rejected outright rather than
emitted as a silent no-op.
"""

from __future__ import annotations

from dataclasses import dataclass

from ..corpus.model import Dialogue
from ..corpus.tokenizer import ByteBpeTokenizer
from .chatformat import CHATML, ChatFormat, render_chat

DEFAULT_MAX_LEN = 4096


class NoLearnableTokens(ValueError):
    def __init__(self, dialogue_id: str, detail: str):
        super().__init__(f"no_learnable_tokens: {dialogue_id}: {detail}")
        self.dialogue_id = dialogue_id


@dataclass
class TrainingSample:
    tokens: list[int]
    loss_mask: list[bool]
    source_ref: str
    provenance: str

    def validate(self, max_len: int = DEFAULT_MAX_LEN) -> None:
        if len(self.tokens) != len(self.loss_mask):
            raise ValueError("tokens and loss_mask lengths differ")
        if len(self.tokens) > max_len:
            raise ValueError(f"sample exceeds {max_len} tokens")
        if not any(self.loss_mask):
            raise ValueError("sample has no learnable tokens")

    def as_record(self) -> dict:
        return {
            "tokens": self.tokens,
            "mask": [1 if m else 0 for m in self.loss_mask],
            "source_ref": self.source_ref,
            "provenance": self.provenance,
        }

    @classmethod
    def from_record(cls, rec: dict) -> "TrainingSample":
        return cls(
            tokens=list(rec["tokens"]),
            loss_mask=[bool(m) for m in rec["mask"]],
            source_ref=rec["source_ref"],
            provenance=rec["provenance"],
        )


def tokenize_with_mask(
    d: Dialogue,
    tok: ByteBpeTokenizer,
    max_len: int = DEFAULT_MAX_LEN,
    fmt: ChatFormat = CHATML,
) -> TrainingSample:
    if max_len < 16:
        raise ValueError("max_len must be ≥ 16")
    text, spans = render_chat(d, fmt)
    learn_ranges = [
        (s.content_start, s.eot_end) for s in spans if s.role == "assistant"
    ]
    if not learn_ranges:
        raise NoLearnableTokens(d.id, "dialogue has no assistant turns")

    ids, offsets = tok.encode_with_offsets(text)
    mask = [
        any(t_start < r_end and r_start < t_end for r_start, r_end in learn_ranges)
        for t_start, t_end in offsets
    ]
    ids = ids[:max_len]
    mask = mask[:max_len]
    if not any(mask):
        raise NoLearnableTokens(
            d.id, f"right-truncation to {max_len} removed every assistant token"
        )
    sample = TrainingSample(
        tokens=ids,
        loss_mask=mask,
        source_ref=d.id,
        provenance=d.provenance,
    )
    sample.validate(max_len)
    return sample
