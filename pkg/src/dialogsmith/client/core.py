"""The model client: chat completion + likelihood scoring over HTTP JSON.

One client drives both a proprietary teacher endpoint and a locally served
open model, because the wire shapes are the two everybody deploys: a
chat-completions shape (messages in, choices out) for generation and a
completions-with-logprob-echo shape for scoring.  The transport is a plain
callable so tests swap in scripted fakes without sockets; rate limiting,
in-flight capping, retries, caching, and telemetry all live here and wrap
whatever transport is used.
"""

from __future__ import annotations

import json
import logging
import threading
import time
from typing import Callable

import requests

from .base import (
    AuthError,
    CapabilityError,
    ChatRequest,
    ChatResponse,
    ClientConfig,
    ScoreRequest,
    ScoreResult,
    Telemetry,
    TransportError,
)
from .cache import ResponseCache, cache_key
from .ratelimit import TokenBucket

log = logging.getLogger(__name__)

# endpoint paths per operation, relative to the configured base URL
_OP_PATHS = {"chat": "/chat/completions", "score": "/completions"}

_RETRYABLE_STATUSES = {408, 429, 500, 502, 503, 504}


class TransportProblem(Exception):
    """Transient transport-level failure (timeout, reset); always retryable."""


Transport = Callable[[str, dict], tuple[int, bytes]]


class HttpTransport:
    def __init__(self, config: ClientConfig):
        self.base = config.endpoint.rstrip("/")
        self.timeout = config.timeout
        self.session = requests.Session()
        token = config.resolve_auth_token()
        if token:
            self.session.headers["Authorization"] = f"Bearer {token}"

    def __call__(self, op: str, payload: dict) -> tuple[int, bytes]:
        url = self.base + _OP_PATHS[op]
        try:
            r = self.session.post(url, json=payload, timeout=self.timeout)
        except requests.RequestException as e:
            raise TransportProblem(str(e)) from e
        return r.status_code, r.content


class ModelClient:
    """Shareable across threads; per-request state stays on the stack."""

    def __init__(
        self,
        config: ClientConfig,
        transport: Transport | None = None,
        clock: Callable[[], float] | None = None,
        sleep: Callable[[float], None] | None = None,
        require: tuple = ("chat",),
    ):
        config.validate()
        self.cfg = config
        self.transport = transport if transport is not None else HttpTransport(config)
        self.sleep = sleep or time.sleep
        self.limiter = TokenBucket(config.requests_per_minute, clock=clock, sleep=self.sleep)
        self.sem = threading.BoundedSemaphore(config.max_in_flight)
        self.cache = ResponseCache(config.cache_dir) if config.cache_dir else None
        self.telemetry = Telemetry()
        if "score" in require:
            self._probe_score_capability()

    # -- capability ---------------------------------------------------------

    def _probe_score_capability(self) -> None:
        """One cheap echo call at construction; failing fast here beats
        failing 10,000 items into an eval run."""
        payload = self._score_payload("capability probe", " ok")
        try:
            status, body = self.transport("score", payload)
        except Exception as e:
            raise CapabilityError(f"scoring probe failed: {e}") from e
        if status != 200:
            raise CapabilityError(f"scoring probe got HTTP {status}")
        try:
            lp = json.loads(body)["choices"][0]["logprobs"]
            _ = lp["token_logprobs"], lp["text_offset"]
        except (KeyError, IndexError, TypeError, json.JSONDecodeError):
            raise CapabilityError(
                "endpoint does not echo per-token logprobs; likelihood "
                "scoring is impossible against it"
            ) from None

    # -- transport with cache / ratelimit / retries -------------------------

    def call(self, op: str, payload: dict) -> dict:
        """Cached, rate-limited, retried request; returns the parsed body."""
        key = None
        if self.cache is not None:
            key = cache_key(self.cfg.endpoint, op, payload)
            hit = self.cache.get(key)
            if hit is not None:
                self.telemetry.bump("cache_hits")
                return json.loads(hit)
            self.telemetry.bump("cache_misses")

        attempts = self.cfg.retry.max_retries + 1
        last_problem = "unknown"
        for i in range(attempts):
            self.limiter.acquire()
            self.telemetry.bump("requests")
            status = None
            body = b""
            with self.sem:
                try:
                    status, body = self.transport(op, payload)
                except TransportProblem as e:
                    last_problem = f"transport: {e}"
            if status == 200:
                if self.cache is not None and key is not None:
                    self.cache.put(key, body)
                return json.loads(body)
            if status in (401, 403):
                raise AuthError(f"endpoint rejected credentials (HTTP {status})")
            if status is not None:
                last_problem = f"HTTP {status}"
                if status not in _RETRYABLE_STATUSES:
                    raise TransportError(f"{op} failed: {last_problem}")
            if i < attempts - 1:
                self.telemetry.bump("retries")
                self.sleep(self.cfg.retry.base_backoff * (2**i))
        raise TransportError(f"{op} failed after {attempts} attempts ({last_problem})")

    # -- operations ----------------------------------------------------------

    def chat_complete(self, req: ChatRequest) -> ChatResponse:
        req.validate()
        payload: dict = {
            "model": self.cfg.model,
            "messages": [{"role": t.role, "content": t.text} for t in req.messages],
            "temperature": req.temperature,
            "max_tokens": req.max_output_tokens,
        }
        if req.seed is not None:
            payload["seed"] = req.seed
        body = self.call("chat", payload)
        try:
            text = body["choices"][0]["message"]["content"]
        except (KeyError, IndexError, TypeError):
            raise TransportError(f"malformed chat response: {body!r}") from None
        if not text:
            raise TransportError("endpoint returned empty completion text")
        return ChatResponse(
            text=text,
            usage=body.get("usage", {}),
            model_id=str(body.get("model", self.cfg.model)),
        )

    def _score_payload(self, context: str, continuation: str) -> dict:
        return {
            "model": self.cfg.model,
            "prompt": context + continuation,
            "max_tokens": 0,
            "echo": True,
            "logprobs": 0,
        }

    def score(self, req: ScoreRequest) -> ScoreResult:
        req.validate()
        body = self.call("score", self._score_payload(req.context, req.continuation))
        try:
            lp = body["choices"][0]["logprobs"]
            logprobs = lp["token_logprobs"]
            offsets = lp["text_offset"]
        except (KeyError, IndexError, TypeError):
            raise TransportError(f"malformed scoring response: {body!r}") from None
        boundary = len(req.context)
        picked: list[float] = []
        for off, val in zip(offsets, logprobs):
            if off < boundary:
                continue
            if val is None:
                raise TransportError(
                    "endpoint returned a null logprob inside the continuation"
                )
            picked.append(float(val))
        if not picked:
            raise TransportError(
                "no tokens fell inside the continuation; check prompt/offset "
                "alignment"
            )
        result = ScoreResult(total_logprob=sum(picked), token_logprobs=picked)
        result.validate()
        return result
