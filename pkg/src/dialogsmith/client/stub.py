"""Deterministic stand-ins for model endpoints.

Used three ways: unit tests exercise retry/cache/rate-limit logic with
`ScriptedTransport`; the dialogue pipeline runs offline with `StubTeacher`;
the eval harness dry-runs with the scorer stubs.  Everything here is
deterministic by construction so pipelines built on top stay replayable.
"""

from __future__ import annotations

import hashlib
import json
import math
import threading
from typing import Callable, Iterable

from .base import ChatRequest, ChatResponse, ScoreRequest, ScoreResult


def chat_body(text: str, model: str = "stub-chat") -> bytes:
    """A wire-shaped chat-completions response body."""
    return json.dumps(
        {
            "choices": [{"message": {"role": "assistant", "content": text}}],
            "usage": {"prompt_tokens": 0, "completion_tokens": 0},
            "model": model,
        }
    ).encode("utf-8")


def score_body(
    context: str, continuation: str, per_token: list[float], model: str = "stub-score"
) -> bytes:
    """A wire-shaped completions body echoing logprobs for the continuation.

    Context tokens get offset 0 with null logprob (as real endpoints do for
    the echoed prompt head); continuation tokens get synthetic offsets past
    the context boundary.
    """
    offsets = [0] + [len(context) + i for i in range(len(per_token))]
    logprobs = [None] + list(per_token)
    tokens = ["<ctx>"] + [f"<t{i}>" for i in range(len(per_token))]
    return json.dumps(
        {
            "choices": [
                {
                    "text": context + continuation,
                    "logprobs": {
                        "tokens": tokens,
                        "token_logprobs": logprobs,
                        "text_offset": offsets,
                    },
                }
            ],
            "model": model,
        }
    ).encode("utf-8")


class ScriptedTransport:
    """Transport fake: pops (status, body) pairs, or calls a handler.

    Tracks concurrency so tests can assert the in-flight cap held under
    load.
    """

    def __init__(
        self,
        script: Iterable[tuple[int, bytes]] | None = None,
        handler: Callable[[str, dict], tuple[int, bytes]] | None = None,
    ):
        self.script = list(script or [])
        self.handler = handler
        self.calls: list[tuple[str, dict]] = []
        self._lock = threading.Lock()
        self._active = 0
        self.high_water = 0

    def __call__(self, op: str, payload: dict) -> tuple[int, bytes]:
        with self._lock:
            self._active += 1
            self.high_water = max(self.high_water, self._active)
            self.calls.append((op, payload))
        try:
            if self.script:
                with self._lock:
                    return self.script.pop(0)
            if self.handler is not None:
                return self.handler(op, payload)
            raise AssertionError("scripted transport ran out of responses")
        finally:
            with self._lock:
                self._active -= 1


def _stable_u64(*parts: str) -> int:
    h = hashlib.sha256("\x1f".join(parts).encode("utf-8")).digest()
    return int.from_bytes(h[:8], "big")


class StubTeacher:
    """Offline teacher: replays canned transcripts.

    mode "hash" picks a transcript from a stable hash of (prompt, seed), so
    the choice survives resume and parallel reordering; mode "sequence"
    consumes replies in call order, which unit tests use to script
    fail-then-succeed retry scenarios.
    """

    def __init__(self, transcripts: list[str], mode: str = "hash"):
        if not transcripts:
            raise ValueError("stub teacher needs at least one transcript")
        if mode not in ("hash", "sequence"):
            raise ValueError(f"unknown stub mode {mode!r}")
        self.transcripts = list(transcripts)
        self.mode = mode
        self.calls = 0
        self._lock = threading.Lock()

    def chat_complete(self, req: ChatRequest) -> ChatResponse:
        req.validate()
        with self._lock:
            if self.mode == "sequence":
                idx = min(self.calls, len(self.transcripts) - 1)
            else:
                prompt = req.messages[-1].text
                idx = _stable_u64(prompt, str(req.seed)) % len(self.transcripts)
            self.calls += 1
        return ChatResponse(
            text=self.transcripts[idx], usage={}, model_id="stub-teacher"
        )


class CallableScorer:
    """Adapter: any (context, continuation) -> ScoreResult function."""

    def __init__(self, fn: Callable[[str, str], ScoreResult]):
        self.fn = fn

    def score(self, req: ScoreRequest) -> ScoreResult:
        req.validate()
        result = self.fn(req.context, req.continuation)
        result.validate()
        return result


class GoldFavoringScorer:
    """Scores the gold continuation at 0.0 and everything else far below.

    Built from benchmark items: the unique item whose question text appears
    in the context decides which continuation is gold (matched against the
    gold letter or the gold option text).  invert=True turns it into the
    anti-gold mock.
    """

    def __init__(self, items, invert: bool = False):
        self.entries = []
        for it in items:
            gold_text = dict(it.options)[it.gold_label]
            self.entries.append((it.question, it.gold_label, gold_text))
        self.invert = invert

    def score(self, req: ScoreRequest) -> ScoreResult:
        req.validate()
        for question, gold_label, gold_text in self.entries:
            if question in req.context:
                cont = req.continuation.strip()
                is_gold = cont == gold_label or cont == gold_text
                favored = is_gold != self.invert
                lp = -0.5 if favored else -9.5
                return ScoreResult(total_logprob=lp, token_logprobs=[lp])
        raise AssertionError("no known item question found in scoring context")


class SeededRandomScorer:
    """Deterministic pseudo-random scorer.

    The logprob is a pure function of (seed, context, continuation), so an
    independent replay reproduces every decision bit-for-bit regardless of
    call order.  Splits the total across a small token vector to exercise
    per-token normalization paths.
    """

    def __init__(self, seed: int):
        self.seed = seed

    def score(self, req: ScoreRequest) -> ScoreResult:
        req.validate()
        u = _stable_u64(str(self.seed), req.context, req.continuation)
        total = -10.0 * ((u % 10**9) / 10**9) - 1e-9  # in [-10, 0)
        n_tokens = 1 + (u >> 32) % 3
        per = [total / n_tokens] * n_tokens
        # keep the exact-sum invariant under float division
        per[-1] = total - sum(per[:-1])
        if math.isnan(per[-1]):
            raise AssertionError("NaN logprob from stub")
        return ScoreResult(total_logprob=total, token_logprobs=per)
