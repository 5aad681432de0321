from .base import (
    AuthError,
    CapabilityError,
    ChatRequest,
    ChatResponse,
    ClientConfig,
    ClientError,
    RetryPolicy,
    ScoreRequest,
    ScoreResult,
    Telemetry,
    TransportError,
)
from .core import HttpTransport, ModelClient

__all__ = [
    "AuthError",
    "CapabilityError",
    "ChatRequest",
    "ChatResponse",
    "ClientConfig",
    "ClientError",
    "HttpTransport",
    "ModelClient",
    "RetryPolicy",
    "ScoreRequest",
    "ScoreResult",
    "Telemetry",
    "TransportError",
]
