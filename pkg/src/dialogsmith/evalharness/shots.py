"""Deterministic k-shot exemplar selection from a dev pool."""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from .benchmarks import BenchmarkItem


@dataclass
class ShotSet:
    exemplars: list[BenchmarkItem] = field(default_factory=list)
    k: int = 0
    seed: int = 0

    def validate(self) -> None:
        if len(self.exemplars) != self.k:
            raise ValueError(f"shot set has {len(self.exemplars)} exemplars, k={self.k}")
        ids = [e.id for e in self.exemplars]
        if len(set(ids)) != len(ids):
            raise ValueError("duplicate exemplar ids in shot set")

    def ids(self) -> set:
        return {e.id for e in self.exemplars}


def build_kshot(pool: list[BenchmarkItem], k: int, seed: int) -> ShotSet:
    """Same (pool, k, seed) -> same exemplars, reused for every test item.

    The pool must be a dev/validation split so exemplars can never leak
    into the evaluated set; `evaluate` re-checks disjointness by id.
    """
    if k < 0:
        raise ValueError("k must be ≥ 0")
    if len(pool) < k:
        raise ValueError(f"dev pool has {len(pool)} items; cannot draw {k} shots")
    exemplars = random.Random(seed).sample(pool, k) if k else []
    s = ShotSet(exemplars=exemplars, k=k, seed=seed)
    s.validate()
    return s
