"""Parse teacher transcripts into Dialogue objects.

Teachers return line-oriented transcripts ("Patient: ...", "Bot: ...").
Parsing is alias-driven so the same code handles Patient/Bot,
Student/Tutor, or Doctor/Patient templates.  Lines before the first
speaker marker (e.g. "Sure, here's the dialogue:") are dropped;
continuation lines without a marker belong to the current turn; and
consecutive same-speaker turns merge, because teachers sometimes split one
utterance across two marked lines.
"""

from __future__ import annotations

import re

from ..corpus.model import Dialogue, Turn


class ParseError(ValueError):
    """code is 'unparseable' or 'malformed_roles'."""

    def __init__(self, code: str, detail: str = ""):
        super().__init__(f"{code}: {detail}" if detail else code)
        self.code = code


def _marker_re(aliases: dict) -> re.Pattern:
    names = sorted(aliases, key=len, reverse=True)
    alt = "|".join(re.escape(n) for n in names)
    # tolerate markdown bold ("**Bot**:" or "**Bot:**") and stray indentation
    return re.compile(
        rf"^\s*(?:\*\*)?({alt})(?:\*\*)?\s*:(?:\*\*)?\s?(.*)$", re.IGNORECASE
    )


def parse_dialogue(raw: str, aliases: dict, dialogue_id: str = "parsed") -> Dialogue:
    """aliases: display name -> role; must cover user and assistant."""
    roles_covered = set(aliases.values())
    if not {"user", "assistant"} <= roles_covered:
        raise ValueError("aliases must map at least one name each to user and assistant")
    canon = {name.lower(): role for name, role in aliases.items()}
    marker = _marker_re(aliases)

    turns: list[Turn] = []
    current: Turn | None = None
    for line in raw.splitlines():
        m = marker.match(line)
        if m:
            role = canon[m.group(1).lower()]
            if current is not None and current.role == role:
                current.text += "\n" + m.group(2)
            else:
                if current is not None:
                    turns.append(current)
                current = Turn(role=role, text=m.group(2))
        elif current is not None and line.strip():
            current.text += "\n" + line
    if current is not None:
        turns.append(current)

    if not turns:
        raise ParseError("unparseable", "no speaker-marked lines found")

    for t in turns:
        t.text = t.text.strip()

    d = Dialogue(id=dialogue_id, turns=turns)
    probs = d.violations()
    if probs:
        raise ParseError("malformed_roles", "; ".join(probs))
    return d


def render_dialogue_lines(d: Dialogue, aliases: dict) -> str:
    """Inverse of parse for accepted dialogues: "Alias: text" lines.

    Round-trips through parse_dialogue provided no turn text line itself
    begins with an alias marker (true for validated pipeline output).
    """
    by_role: dict = {}
    for name, role in aliases.items():
        by_role.setdefault(role, name)
    lines = []
    for t in d.turns:
        name = by_role.get(t.role)
        if name is None:
            raise ValueError(f"no alias for role {t.role!r}")
        lines.append(f"{name}: {t.text}")
    return "\n".join(lines)
