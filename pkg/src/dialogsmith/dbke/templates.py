"""Prompt templates: text files with YAML front matter.

Layout::

    ---
    name: dialogue_default
    aliases: {Patient: user, Bot: assistant}
    constraints:
      - first behavioral rule
      - second rule
    ---
    Preamble text...
    {{RULES}}

    {{PASSAGE}}

``{{PASSAGE}}`` must appear exactly once; ``{{RULES}}`` must appear exactly
once when the template carries constraints.  Rendering numbers the
constraints 1..n in order and substitutes both slots.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import yaml

PASSAGE_SLOT = "{{PASSAGE}}"
RULES_SLOT = "{{RULES}}"


class TemplateError(ValueError):
    pass


@dataclass
class PromptTemplate:
    name: str
    preamble: str
    constraints: list[str] = field(default_factory=list)
    aliases: dict = field(default_factory=dict)  # display name -> role

    def validate(self) -> None:
        n_slots = self.preamble.count(PASSAGE_SLOT)
        if n_slots != 1:
            raise TemplateError(
                f"template {self.name!r}: need exactly one {PASSAGE_SLOT} "
                f"slot, found {n_slots}"
            )
        if self.constraints and self.preamble.count(RULES_SLOT) != 1:
            raise TemplateError(
                f"template {self.name!r}: constraints present but no single "
                f"{RULES_SLOT} slot to hold them"
            )
        for alias, role in self.aliases.items():
            if role not in ("user", "assistant", "system"):
                raise TemplateError(
                    f"template {self.name!r}: alias {alias!r} maps to "
                    f"unknown role {role!r}"
                )

    def render(self, passage: str) -> str:
        if not passage or not passage.strip():
            raise ValueError("empty_passage")
        out = self.preamble
        if self.constraints:
            rules = "\n".join(
                f"{i}. {rule}" for i, rule in enumerate(self.constraints, start=1)
            )
            out = out.replace(RULES_SLOT, rules)
        return out.replace(PASSAGE_SLOT, passage)


def _parse_template_text(text: str, origin: str) -> PromptTemplate:
    if not text.startswith("---"):
        raise TemplateError(f"{origin}: missing front-matter header")
    try:
        _, header, body = text.split("---", 2)
    except ValueError:
        raise TemplateError(f"{origin}: unterminated front-matter header") from None
    meta = yaml.safe_load(header) or {}
    t = PromptTemplate(
        name=str(meta.get("name", Path(origin).stem)),
        preamble=body.lstrip("\n"),
        constraints=[str(c) for c in meta.get("constraints", [])],
        aliases={str(k): str(v) for k, v in (meta.get("aliases") or {}).items()},
    )
    t.validate()
    return t


def load_template(path: str | Path) -> PromptTemplate:
    p = Path(path)
    return _parse_template_text(p.read_text(encoding="utf-8"), str(p))


def builtin_template(name: str) -> PromptTemplate:
    """Load one of the templates bundled with the package."""
    ref = resources.files("dialogsmith") / "templates" / f"{name}.tmpl"
    try:
        text = ref.read_text(encoding="utf-8")
    except FileNotFoundError:
        raise TemplateError(f"no builtin template named {name!r}") from None
    return _parse_template_text(text, f"builtin:{name}")
