"""Request/response types, config, and errors for the model client."""

from __future__ import annotations

import os
import threading
from dataclasses import dataclass, field
from pathlib import Path

from ..corpus.model import Turn

SUM_TOLERANCE = 1e-6


class ClientError(Exception):
    pass


class TransportError(ClientError):
    """Retries exhausted or a non-retryable endpoint failure."""


class AuthError(ClientError):
    """Endpoint rejected credentials; never retried."""


class CapabilityError(ClientError):
    """Endpoint cannot do what the caller needs (e.g. no logprob echo)."""


@dataclass
class ChatRequest:
    messages: list[Turn]
    temperature: float = 0.7
    max_output_tokens: int = 1024
    seed: int | None = None

    def validate(self) -> None:
        if not self.messages:
            raise ValueError("chat request has no messages")
        if self.messages[-1].role != "user":
            raise ValueError("last chat message must be from user")


@dataclass
class ChatResponse:
    text: str
    usage: dict
    model_id: str


@dataclass
class ScoreRequest:
    context: str
    continuation: str

    def validate(self) -> None:
        if not self.continuation:
            raise ValueError("empty_continuation")


@dataclass
class ScoreResult:
    total_logprob: float
    token_logprobs: list[float]

    @property
    def token_count(self) -> int:
        return len(self.token_logprobs)

    def validate(self) -> None:
        if self.total_logprob > 0:
            raise ValueError("total_logprob must be ≤ 0")
        if abs(self.total_logprob - sum(self.token_logprobs)) > SUM_TOLERANCE:
            raise ValueError(
                "total_logprob drifts from token sum by more than "
                f"{SUM_TOLERANCE}"
            )


@dataclass
class RetryPolicy:
    max_retries: int = 3
    base_backoff: float = 0.5  # seconds; doubles per retry


@dataclass
class ClientConfig:
    endpoint: str
    model: str = ""
    auth_env: str = "MODEL_API_KEY"
    auth_token_file: str | None = None
    max_in_flight: int = 4
    requests_per_minute: int = 60
    retry: RetryPolicy = field(default_factory=RetryPolicy)
    cache_dir: str | None = None
    timeout: float = 120.0

    def validate(self) -> None:
        if not self.endpoint:
            raise ValueError("endpoint url is required")
        if self.max_in_flight < 1:
            raise ValueError("max_in_flight must be ≥ 1")
        if self.requests_per_minute < 1:
            raise ValueError("requests_per_minute must be ≥ 1")

    def resolve_auth_token(self) -> str | None:
        tok = os.environ.get(self.auth_env, "")
        if tok:
            return tok
        if self.auth_token_file:
            return Path(self.auth_token_file).read_text(encoding="utf-8").strip()
        return None


class Telemetry:
    """Thread-safe counters, dumpable as JSON for run reports."""

    def __init__(self):
        self._lock = threading.Lock()
        self.requests = 0
        self.retries = 0
        self.cache_hits = 0
        self.cache_misses = 0

    def bump(self, name: str, by: int = 1) -> None:
        with self._lock:
            setattr(self, name, getattr(self, name) + by)

    def as_dict(self) -> dict:
        with self._lock:
            return {
                "requests": self.requests,
                "retries": self.retries,
                "cache_hits": self.cache_hits,
                "cache_misses": self.cache_misses,
            }
