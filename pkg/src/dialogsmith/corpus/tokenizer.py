"""Byte-fallback BPE tokenizer with GPT-2 style vocab.json / merges.txt files.

Why own this instead of wrapping a tokenizer package: the pipeline needs
(a) exact char-offset tracking per token so loss masks can be mapped from
rendered text spans, (b) piece-level count memoization so segment budgeting
over thousands of conversations stays fast, and (c) a guarantee that any
byte sequence round-trips (byte fallback).  The file format matches the
common vocab.json + merges.txt layout so a real student model's tokenizer
drops in unchanged.
"""

from __future__ import annotations

import json
import re
from pathlib import Path

# Pre-tokenization: a word keeps at most one preceding space; whitespace runs
# stay whole.  Deterministic and reversible (pieces concatenate to the text).
_PIECE_RE = re.compile(r" ?\S+|\s+")

MERGES_HEADER = "#version: byte-bpe-1"


def _bytes_to_unicode() -> dict[int, str]:
    """Map every byte to a printable unicode char (the usual BPE alphabet).

    Printable ASCII and most latin-1 map to themselves; the rest are shifted
    into an unused plane so vocab/merges files stay human-readable.
    """
    bs = (
        list(range(ord("!"), ord("~") + 1))
        + list(range(0xA1, 0xAD))
        + list(range(0xAE, 0x100))
    )
    cs = bs[:]
    n = 0
    for b in range(256):
        if b not in bs:
            bs.append(b)
            cs.append(256 + n)
            n += 1
    return {b: chr(c) for b, c in zip(bs, cs)}


_BYTE_TO_CHAR = _bytes_to_unicode()
_CHAR_TO_BYTE = {c: b for b, c in _BYTE_TO_CHAR.items()}


class TokenizerError(ValueError):
    pass


class ByteBpeTokenizer:
    """Byte-level BPE: encode/decode, char offsets, cached piece counts."""

    def __init__(self, vocab: dict[str, int], merges: list[tuple[str, str]]):
        missing = [ch for ch in _BYTE_TO_CHAR.values() if ch not in vocab]
        if missing:
            raise TokenizerError(
                f"vocab lacks {len(missing)} base byte symbols; byte fallback "
                "would be impossible"
            )
        ids = list(vocab.values())
        if len(set(ids)) != len(ids):
            raise TokenizerError("vocab has duplicate token ids")
        for a, b in merges:
            if a + b not in vocab:
                raise TokenizerError(f"merge product {a + b!r} missing from vocab")
        self.vocab = dict(vocab)
        self.inv_vocab = {i: s for s, i in self.vocab.items()}
        self.merges = list(merges)
        self.ranks = {pair: r for r, pair in enumerate(self.merges)}
        self._piece_cache: dict[str, list[str]] = {}

    # -- constructors ------------------------------------------------------

    @classmethod
    def bytes_only(cls) -> "ByteBpeTokenizer":
        """256-token fallback tokenizer: one token per byte, no merges."""
        vocab = {ch: i for i, ch in sorted(
            ((b, c) for b, c in _BYTE_TO_CHAR.items()), key=lambda x: x[0]
        )}
        return cls(vocab, [])

    @classmethod
    def from_files(cls, vocab_path: str | Path, merges_path: str | Path) -> "ByteBpeTokenizer":
        vocab = json.loads(Path(vocab_path).read_text(encoding="utf-8"))
        merges = []
        for ln, line in enumerate(
            Path(merges_path).read_text(encoding="utf-8").splitlines()
        ):
            if ln == 0 and line.startswith("#"):
                continue
            if not line.strip():
                continue
            parts = line.split(" ")
            if len(parts) != 2:
                raise TokenizerError(f"merges line {ln + 1} malformed: {line!r}")
            merges.append((parts[0], parts[1]))
        return cls(vocab, merges)

    def to_files(self, vocab_path: str | Path, merges_path: str | Path) -> None:
        Path(vocab_path).write_text(
            json.dumps(self.vocab, ensure_ascii=False, indent=0), encoding="utf-8"
        )
        lines = [MERGES_HEADER] + [f"{a} {b}" for a, b in self.merges]
        Path(merges_path).write_text("\n".join(lines) + "\n", encoding="utf-8")

    # -- core BPE ----------------------------------------------------------

    def _bpe_piece(self, piece: str) -> list[str]:
        """Merge a single pre-token piece down to vocab symbols."""
        cached = self._piece_cache.get(piece)
        if cached is not None:
            return cached
        word = [_BYTE_TO_CHAR[b] for b in piece.encode("utf-8")]
        while len(word) > 1:
            best_rank = None
            best_pair = None
            for pair in zip(word, word[1:]):
                r = self.ranks.get(pair)
                if r is not None and (best_rank is None or r < best_rank):
                    best_rank = r
                    best_pair = pair
            if best_pair is None:
                break
            a, b = best_pair
            out = []
            i = 0
            while i < len(word):
                if i < len(word) - 1 and word[i] == a and word[i + 1] == b:
                    out.append(a + b)
                    i += 2
                else:
                    out.append(word[i])
                    i += 1
            word = out
        self._piece_cache[piece] = word
        return word

    def encode(self, text: str) -> list[int]:
        return [self.vocab[s] for p in _PIECE_RE.findall(text) for s in self._bpe_piece(p)]

    def encode_with_offsets(self, text: str) -> tuple[list[int], list[tuple[int, int]]]:
        """Encode and report, per token, the [start, end) char span it covers.

        BPE operates on bytes, so a token may cover a fragment of a multibyte
        char; spans are widened to whole chars in that case (fragments of one
        char share its span).  Spans are non-decreasing and tile the text.
        """
        ids: list[int] = []
        spans: list[tuple[int, int]] = []
        pos = 0
        for piece in _PIECE_RE.findall(text):
            # char index owning each byte of the piece, plus a sentinel end
            byte_owner: list[int] = []
            for ci, ch in enumerate(piece):
                byte_owner.extend([ci] * len(ch.encode("utf-8")))
            byte_owner.append(len(piece))
            b = 0
            for sym in self._bpe_piece(piece):
                nbytes = len(sym)  # each symbol char encodes exactly one byte
                start_c = byte_owner[b]
                last_c = byte_owner[b + nbytes - 1]
                end_c = last_c + 1 if last_c < len(piece) else len(piece)
                ids.append(self.vocab[sym])
                spans.append((pos + start_c, pos + end_c))
                b += nbytes
            pos += len(piece)
        return ids, spans

    def count(self, text: str) -> int:
        """Token count; memoized per pre-token piece, so repeated turns and
        shared scaffolding are nearly free."""
        return sum(len(self._bpe_piece(p)) for p in _PIECE_RE.findall(text))

    def decode(self, ids: list[int]) -> str:
        try:
            symbols = [self.inv_vocab[i] for i in ids]
        except KeyError as e:
            raise TokenizerError(f"unknown token id {e.args[0]}") from None
        data = bytes(_CHAR_TO_BYTE[c] for sym in symbols for c in sym)
        return data.decode("utf-8", errors="replace")

    @property
    def vocab_size(self) -> int:
        return len(self.vocab)


def learn_merges(texts: list[str], n_merges: int) -> ByteBpeTokenizer:
    """Train a small BPE table (for fixtures/tests; not a production trainer).

    Classic greedy pair counting over pre-token pieces.  Ties break to the
    lexicographically smallest pair so training is deterministic.
    """
    from collections import Counter

    piece_freq: Counter = Counter()
    for t in texts:
        piece_freq.update(_PIECE_RE.findall(t))
    words = {
        p: [ _BYTE_TO_CHAR[b] for b in p.encode("utf-8") ]
        for p in piece_freq
    }
    merges: list[tuple[str, str]] = []
    for _ in range(n_merges):
        pair_freq: Counter = Counter()
        for p, word in words.items():
            f = piece_freq[p]
            for pair in zip(word, word[1:]):
                pair_freq[pair] += f
        if not pair_freq:
            break
        top = max(pair_freq.values())
        if top < 2:
            break
        pair = min(p for p, f in pair_freq.items() if f == top)
        merges.append(pair)
        a, b = pair
        for p, word in words.items():
            out = []
            i = 0
            while i < len(word):
                if i < len(word) - 1 and word[i] == a and word[i + 1] == b:
                    out.append(a + b)
                    i += 2
                else:
                    out.append(word[i])
                    i += 1
            words[p] = out
    vocab = {ch: i for i, ch in enumerate(
        _BYTE_TO_CHAR[b] for b in sorted(_BYTE_TO_CHAR)
    )}
    nxt = len(vocab)
    for a, b in merges:
        vocab[a + b] = nxt
        nxt += 1
    return ByteBpeTokenizer(vocab, merges)
