"""Character-trigram language detection.

Each bundled profile is turned into a Laplace-smoothed trigram
log-probability model; detection scores a text under every model and
returns the best language plus its posterior (uniform prior).  The
posterior doubles as the confidence value: it lives in [0, 1] and grows
monotonically with the log-likelihood margin over the runner-up, so "more
evidence in, higher confidence out" holds by construction.
"""

from __future__ import annotations

import math
import re
from collections import Counter

from .profiles import PROFILE_TEXTS

_NORM_RE = re.compile(r"[\d\W_]+", re.UNICODE)

# Smoothing pseudo-count.  Small enough that real trigrams dominate, large
# enough that unseen trigrams don't zero a language out.
_ALPHA = 0.5


def _normalize(text: str) -> str:
    # Lowercase, fold digits/punctuation into spaces, pad ends so word
    # boundaries produce trigrams too.
    folded = _NORM_RE.sub(" ", text.lower()).strip()
    return f" {folded} " if folded else ""


def _trigrams(text: str) -> list[str]:
    norm = _normalize(text)
    return [norm[i : i + 3] for i in range(len(norm) - 2)]


class _TrigramModel:
    def __init__(self, text: str):
        self.counts = Counter(_trigrams(text))
        self.total = sum(self.counts.values())

    def logprob(self, trigram: str, vocab_size: int) -> float:
        c = self.counts.get(trigram, 0)
        return math.log((c + _ALPHA) / (self.total + _ALPHA * vocab_size))


class LanguageDetector:
    """Scores text against bundled language profiles."""

    def __init__(self, profile_texts: dict[str, str] | None = None):
        texts = profile_texts if profile_texts is not None else PROFILE_TEXTS
        if not texts:
            raise ValueError("no language profiles given")
        self.models = {lang: _TrigramModel(t) for lang, t in texts.items()}
        vocab = set()
        for m in self.models.values():
            vocab.update(m.counts)
        self.vocab_size = max(len(vocab), 1)

    def detect(self, text: str) -> tuple[str, float]:
        """Return (language, confidence).  Raises ValueError on empty text.

        Confidence is the posterior of the winning language under a uniform
        prior, computed with the usual log-sum-exp guard.
        """
        grams = _trigrams(text)
        if not grams:
            raise ValueError("empty_text: nothing left to score after normalization")
        scores = {
            lang: sum(m.logprob(g, self.vocab_size) for g in grams)
            for lang, m in self.models.items()
        }
        best_lang = max(scores, key=lambda k: (scores[k], k))
        mx = scores[best_lang]
        denom = sum(math.exp(s - mx) for s in scores.values())
        return best_lang, 1.0 / denom

    def languages(self) -> list[str]:
        return sorted(self.models)

    def is_english(self, text: str, threshold: float = 0.8) -> bool:
        try:
            lang, conf = self.detect(text)
        except ValueError:
            return False
        return lang == "en" and conf >= threshold


_DEFAULT: LanguageDetector | None = None


def default_detector() -> LanguageDetector:
    global _DEFAULT
    if _DEFAULT is None:
        _DEFAULT = LanguageDetector()
    return _DEFAULT
