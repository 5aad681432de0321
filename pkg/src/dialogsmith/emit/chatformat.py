"""Chat serialization with exact character-span bookkeeping.

A format is a role-header + end-of-turn delimiter scheme loaded from a
small versioned JSON spec; the default is the widely documented
`<|im_start|>role ... <|im_end|>` convention.  Loss masks are only
meaningful relative to a fixed format, so the format (name, version) is
recorded alongside anything derived from it.

Rendering guarantees two properties the masking stage leans on:

  * every turn block both starts and ends on a non-whitespace/newline
    boundary such that BPE pre-tokenization can never produce a token
    spanning two blocks — tokens therefore never straddle roles;
  * each turn's content char range and end-delimiter char range are
    reported exactly, so "is this token assistant content?" is a pure
    interval-intersection question.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

from ..corpus.model import Dialogue

FORMAT_VERSION = 1


@dataclass
class ChatFormat:
    name: str
    version: int
    header_prefix: str = "<|im_start|>"
    header_suffix: str = "\n"
    end_of_turn: str = "<|im_end|>\n"

    def header(self, role: str) -> str:
        return f"{self.header_prefix}{role}{self.header_suffix}"

    def validate(self) -> None:
        for field_name in ("header_prefix", "end_of_turn"):
            v = getattr(self, field_name)
            if not v or v[:1].isspace():
                raise ValueError(
                    f"chat format {self.name!r}: {field_name} must start "
                    "non-whitespace so blocks cannot merge during tokenization"
                )
        if not self.end_of_turn.endswith(("\n",)):
            raise ValueError(
                f"chat format {self.name!r}: end_of_turn must end with a "
                "newline to seal the block boundary"
            )


CHATML = ChatFormat(name="chatml", version=FORMAT_VERSION)


def load_chat_format(path: str | Path) -> ChatFormat:
    spec = json.loads(Path(path).read_text(encoding="utf-8"))
    fmt = ChatFormat(
        name=str(spec["name"]),
        version=int(spec["version"]),
        header_prefix=spec.get("header_prefix", CHATML.header_prefix),
        header_suffix=spec.get("header_suffix", CHATML.header_suffix),
        end_of_turn=spec.get("end_of_turn", CHATML.end_of_turn),
    )
    fmt.validate()
    return fmt


@dataclass
class TurnSpan:
    turn_index: int
    role: str
    content_start: int
    content_end: int
    eot_start: int
    eot_end: int


def render_chat(d: Dialogue, fmt: ChatFormat = CHATML) -> tuple[str, list[TurnSpan]]:
    """Returns (text, per-turn spans).  Turn text is stripped when rendered;
    spans point at the stripped content inside the rendered text."""
    parts: list[str] = []
    spans: list[TurnSpan] = []
    pos = 0
    for i, turn in enumerate(d.turns):
        header = fmt.header(turn.role)
        content = turn.text.strip()
        parts.append(header)
        pos += len(header)
        c_start = pos
        parts.append(content)
        pos += len(content)
        c_end = pos
        parts.append(fmt.end_of_turn)
        e_end = pos + len(fmt.end_of_turn)
        spans.append(
            TurnSpan(
                turn_index=i,
                role=turn.role,
                content_start=c_start,
                content_end=c_end,
                eot_start=c_end,
                eot_end=e_end,
            )
        )
        pos = e_end
    return "".join(parts), spans
