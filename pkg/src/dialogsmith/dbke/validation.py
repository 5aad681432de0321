"""Soft alignment checks applied to parsed dialogues before acceptance.

Violation tags: too_short, bot_first, non_alternating, empty_turn,
over_token_budget.  Empty list means accepted; any tag triggers a
regeneration attempt upstream.
"""

from __future__ import annotations

from dataclasses import dataclass

from ..corpus.model import Dialogue
from ..corpus.segment import render_segment_text
from ..corpus.tokenizer import ByteBpeTokenizer


@dataclass
class ValidationPolicy:
    min_exchanges: int = 3
    require_user_first: bool = True
    require_alternation: bool = True
    max_dialogue_tokens: int | None = None


def count_exchanges(d: Dialogue) -> int:
    """An exchange is a user turn followed directly by an assistant reply."""
    convo = d.non_system_turns()
    return sum(
        1
        for a, b in zip(convo, convo[1:])
        if a.role == "user" and b.role == "assistant"
    )


def validate_dialogue(
    d: Dialogue,
    policy: ValidationPolicy | None = None,
    tok: ByteBpeTokenizer | None = None,
) -> list[str]:
    policy = policy or ValidationPolicy()
    tags: list[str] = []

    convo = d.non_system_turns()
    if policy.require_user_first and convo and convo[0].role != "user":
        tags.append("bot_first")

    if count_exchanges(d) < policy.min_exchanges:
        tags.append("too_short")

    if any(not t.text.strip() for t in convo):
        tags.append("empty_turn")

    if policy.require_alternation:
        expected = "user"
        for t in convo:
            if t.role != expected:
                if "bot_first" not in tags or t is not convo[0]:
                    tags.append("non_alternating")
                break
            expected = "assistant" if expected == "user" else "user"

    if policy.max_dialogue_tokens is not None:
        if tok is None:
            raise ValueError("max_dialogue_tokens set but no tokenizer given")
        if tok.count(render_segment_text(d.turns)) > policy.max_dialogue_tokens:
            tags.append("over_token_budget")

    return tags
