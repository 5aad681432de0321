"""Degenerate-conversation detection.

Four gates, each mapping to a canonical reason tag:

    too_few_turns   -- fewer than 2 non-system turns
    empty_turn      -- any user/assistant turn that is blank after stripping
    repetition      -- some turn's duplicate 4-gram fraction exceeds 0.5
    non_alternating -- roles don't strictly alternate user/assistant after
                       the optional leading system turn

The repetition ratio is ``(total - distinct) / total`` over overlapping
word 4-grams within a single turn.  Normal prose sits near zero; a model
stuck in a copy loop (one phrase repeated twenty times) lands above 0.9.
"""

from __future__ import annotations

from dataclasses import dataclass

from .model import Dialogue

REASON_TOO_FEW = "too_few_turns"
REASON_EMPTY = "empty_turn"
REASON_REPETITION = "repetition"
REASON_NON_ALTERNATING = "non_alternating"


@dataclass
class DegeneracyPolicy:
    min_nonsystem_turns: int = 2
    ngram_order: int = 4
    repetition_threshold: float = 0.5


DEFAULT_POLICY = DegeneracyPolicy()


def duplicate_ngram_fraction(text: str, n: int = 4) -> float:
    """Fraction of overlapping word n-grams that repeat an earlier one.

    0.0 when there are fewer than n words (nothing to judge).
    """
    words = text.lower().split()
    total = len(words) - n + 1
    if total <= 0:
        return 0.0
    distinct = len({tuple(words[i : i + n]) for i in range(total)})
    return (total - distinct) / total


def is_degenerate(
    dlg: Dialogue, policy: DegeneracyPolicy = DEFAULT_POLICY
) -> tuple[bool, list[str]]:
    """Returns (degenerate?, ordered list of canonical reason tags)."""
    reasons: list[str] = []

    convo = dlg.non_system_turns()
    if len(convo) < policy.min_nonsystem_turns:
        reasons.append(REASON_TOO_FEW)

    if any(not t.text.strip() for t in convo):
        reasons.append(REASON_EMPTY)

    if any(
        duplicate_ngram_fraction(t.text, policy.ngram_order)
        > policy.repetition_threshold
        for t in dlg.turns
    ):
        reasons.append(REASON_REPETITION)

    expected = "user"
    for t in convo:
        if t.role != expected:
            reasons.append(REASON_NON_ALTERNATING)
            break
        expected = "assistant" if expected == "user" else "user"
    if any(t.role == "system" for t in dlg.turns[1:]):
        if REASON_NON_ALTERNATING not in reasons:
            reasons.append(REASON_NON_ALTERNATING)

    return (bool(reasons), reasons)
