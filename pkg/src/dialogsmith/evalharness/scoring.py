"""Prompt construction, answer selection, and the evaluation loop.

Scoring compares the log-likelihood the model assigns to each option's
continuation after a shared context.  Two continuation styles:

    letter       " A" / " B" / ...          (default)
    option_text  " yes" / " the mitral valve" / ...

and two normalizations: raw_sum (sum of token logprobs) or per_token
(sum / token count), which matters for uneven option lengths in
option_text style.  Accuracy is kept as an exact Fraction end to end.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

from ..client.base import ScoreRequest, ScoreResult
from ..jsonlio import write_jsonl
from .benchmarks import BenchmarkItem
from .report import EvalReport
from .shots import ShotSet

log = logging.getLogger(__name__)


@dataclass
class EvalConfig:
    k: int = 0
    normalization: str = "raw_sum"  # or "per_token"
    seed: int = 0
    continuation_style: str = "letter"  # or "option_text"
    abort_on_error: bool = True

    def validate(self) -> None:
        if self.normalization not in ("raw_sum", "per_token"):
            raise ValueError(f"unknown normalization {self.normalization!r}")
        if self.continuation_style not in ("letter", "option_text"):
            raise ValueError(f"unknown continuation style {self.continuation_style!r}")
        if self.k < 0:
            raise ValueError("k must be ≥ 0")


def _item_block(item: BenchmarkItem, cfg: EvalConfig, answer: bool) -> str:
    lines = []
    if item.context:
        lines.append(f"Context: {item.context}")
    lines.append(f"Question: {item.question}")
    for label, text in item.options:
        lines.append(f"{label}. {text}")
    if answer:
        gold = item.gold_label if cfg.continuation_style == "letter" else item.gold_text
        lines.append(f"Answer: {gold}")
    else:
        lines.append("Answer:")
    return "\n".join(lines)


def format_mc_prompt(
    item: BenchmarkItem, shots: ShotSet, cfg: EvalConfig
) -> tuple[str, list[str]]:
    """Returns (context, one continuation per option, in option order)."""
    parts = ["The following are multiple choice questions (with answers).\n"]
    for ex in shots.exemplars:
        parts.append(_item_block(ex, cfg, answer=True) + "\n")
    parts.append(_item_block(item, cfg, answer=False))
    context = "\n".join(parts)
    if cfg.continuation_style == "letter":
        continuations = [f" {label}" for label, _ in item.options]
    else:
        continuations = [f" {text}" for _, text in item.options]
    return context, continuations


def select_answer(scores: list[ScoreResult], cfg: EvalConfig) -> int:
    """Argmax with ties to the lowest option index."""
    if len(scores) < 2:
        raise ValueError("need at least 2 option scores")
    best_idx = 0
    best_val = None
    for i, s in enumerate(scores):
        val = s.total_logprob
        if cfg.normalization == "per_token":
            if s.token_count == 0:
                raise ValueError("zero-token continuation cannot be normalized")
            val = s.total_logprob / s.token_count
        if best_val is None or val > best_val:
            best_val = val
            best_idx = i
    return best_idx


def evaluate(
    items: list[BenchmarkItem],
    client,
    shots: ShotSet,
    cfg: EvalConfig,
    benchmark: str = "benchmark",
    model_id: str = "model",
    config_hash: str = "",
    audit_path: str | Path | None = None,
) -> EvalReport:
    """client must expose score(ScoreRequest) -> ScoreResult."""
    cfg.validate()
    shots.validate()
    if not items:
        raise ValueError("no items to evaluate")
    overlap = shots.ids() & {it.id for it in items}
    if overlap:
        raise ValueError(
            f"exemplars leak into the evaluated set: {sorted(overlap)[:5]}"
        )

    n_correct = 0
    n_scored = 0
    audit: list[dict] = []
    for item in items:
        item.validate()
        context, continuations = format_mc_prompt(item, shots, cfg)
        try:
            scores = [
                client.score(ScoreRequest(context=context, continuation=c))
                for c in continuations
            ]
        except Exception as e:
            if cfg.abort_on_error:
                raise RuntimeError(f"scoring failed on item {item.id}: {e}") from e
            log.warning("item %s errored (%s); excluded from accuracy", item.id, e)
            audit.append({"id": item.id, "error": str(e)})
            continue
        chosen = select_answer(scores, cfg)
        n_scored += 1
        correct = chosen == item.gold_index
        n_correct += int(correct)
        audit.append(
            {
                "id": item.id,
                "chosen": item.options[chosen][0],
                "gold": item.gold_label,
                "correct": correct,
                "totals": [s.total_logprob for s in scores],
                "token_counts": [s.token_count for s in scores],
            }
        )

    if n_scored == 0:
        raise RuntimeError("every item errored; nothing to report")
    if audit_path is not None:
        write_jsonl(audit_path, audit)
    return EvalReport(
        benchmark=benchmark,
        n_items=n_scored,
        n_correct=n_correct,
        accuracy=Fraction(n_correct, n_scored),
        k=cfg.k,
        config_hash=config_hash,
        model_id=model_id,
    )
