"""Token-bucket rate limiter with injectable clock/sleep for testing."""

from __future__ import annotations

import threading
import time
from typing import Callable


class TokenBucket:
    """Classic token bucket: capacity = rate, refill = rate/60 per second.

    acquire() blocks (via the injected sleep) until a token is available,
    which bounds the sustained request rate to `per_minute` within any
    60-second window.
    """

    def __init__(
        self,
        per_minute: int,
        clock: Callable[[], float] | None = None,
        sleep: Callable[[float], None] | None = None,
    ):
        if per_minute < 1:
            raise ValueError("per_minute must be ≥ 1")
        self.capacity = float(per_minute)
        self.rate = per_minute / 60.0
        self.clock = clock or time.monotonic
        self.sleep = sleep or time.sleep
        self._lock = threading.Lock()
        self._tokens = self.capacity
        self._last = self.clock()

    def _refill(self) -> None:
        now = self.clock()
        self._tokens = min(self.capacity, self._tokens + (now - self._last) * self.rate)
        self._last = now

    def acquire(self) -> None:
        while True:
            with self._lock:
                self._refill()
                if self._tokens >= 1.0:
                    self._tokens -= 1.0
                    return
                wait = (1.0 - self._tokens) / self.rate
            self.sleep(wait)
