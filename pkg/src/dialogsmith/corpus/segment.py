"""Token-budget segmentation of conversations.

Splits only at turn boundaries; a single turn that alone exceeds the budget
is hard-truncated (and flagged) rather than dropped, so the lossy action
stays auditable.  Token counts are taken on a minimal line rendering

    role: text\n

with the text stripped.  Every block starts and ends on a non-space char,
so the pre-tokenizer can never merge across block seams: the count of a
rendered segment is exactly the sum of its per-turn block counts.  That
makes the O(1)-per-turn greedy packer equal to brute-force prefix
tokenization, while staying fast enough for corpus-scale runs.
"""

from __future__ import annotations

from .model import Dialogue, Turn
from .tokenizer import ByteBpeTokenizer

FLAG_TRUNCATED = "truncated"


def turn_block(turn: Turn) -> str:
    body = turn.text.strip()
    return f"{turn.role}: {body}\n" if body else f"{turn.role}:\n"


def render_segment_text(turns: list[Turn]) -> str:
    """The exact text the token budget is measured against."""
    return "".join(turn_block(t) for t in turns)


def count_tokens(text: str, tok: ByteBpeTokenizer) -> int:
    return tok.count(text)


def _hard_truncate(turn: Turn, max_tokens: int, tok: ByteBpeTokenizer) -> Turn:
    """Largest stripped prefix of the turn whose block fits the budget.

    Binary search assuming count grows with prefix length, then a linear
    safety walk-back; the returned turn is guaranteed to fit regardless of
    any local non-monotonicity in BPE counts.
    """
    body = turn.text.strip()

    def fits(k: int) -> bool:
        return tok.count(turn_block(Turn(turn.role, body[:k]))) <= max_tokens

    lo, hi = 0, len(body)
    while lo < hi:
        mid = (lo + hi + 1) // 2
        if fits(mid):
            lo = mid
        else:
            hi = mid - 1
    while lo > 0 and not fits(lo):
        lo -= 1
    return Turn(role=turn.role, text=body[:lo].rstrip())


def segment_conversation(
    d: Dialogue, max_tokens: int, tok: ByteBpeTokenizer
) -> list[Dialogue]:
    """Greedy packing of whole turns into ≤ max_tokens segments.

    Oversized single turns become their own truncated segment.  Ordered
    concatenation of segment turn lists reproduces d.turns whenever no
    truncation happened.
    """
    if max_tokens < 16:
        raise ValueError(f"max_tokens must be ≥ 16, got {max_tokens}")

    segments: list[Dialogue] = []
    cur_turns: list[Turn] = []
    cur_count = 0

    def flush(extra_flags: list[str] | None = None) -> None:
        nonlocal cur_turns, cur_count
        if not cur_turns:
            return
        seg = Dialogue(
            id=f"{d.id}/seg{len(segments)}",
            turns=cur_turns,
            provenance=d.provenance,
            source_doc=d.source_doc,
            attempts=d.attempts,
            flags=list(d.flags) + (extra_flags or []),
            meta=dict(d.meta),
        )
        segments.append(seg)
        cur_turns = []
        cur_count = 0

    for turn in d.turns:
        c = tok.count(turn_block(turn))
        if c > max_tokens:
            flush()
            cur_turns = [_hard_truncate(turn, max_tokens, tok)]
            flush(extra_flags=[FLAG_TRUNCATED])
            continue
        if cur_turns and cur_count + c > max_tokens:
            flush()
        cur_turns.append(turn)
        cur_count += c
    flush()
    return segments
