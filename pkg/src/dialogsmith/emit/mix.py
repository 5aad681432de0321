"""Dataset mixing: concatenate streams, seeded global shuffle.

No weighting scheme — stream sizes are the implicit mixing ratio, and the
shuffle is a plain Fisher-Yates driven by the run seed, so the same seed
always reproduces the same sample order.
"""

from __future__ import annotations

import random
from typing import Iterable

from .masking import TrainingSample


def mix_and_shuffle(
    streams: list[Iterable[TrainingSample]], seed: int
) -> list[TrainingSample]:
    if not streams:
        raise ValueError("need at least one sample stream")
    combined: list[TrainingSample] = []
    for stream in streams:
        combined.extend(stream)
    random.Random(seed).shuffle(combined)
    return combined
