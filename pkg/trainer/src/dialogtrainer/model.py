"""A deliberately small causal transformer with low-rank adapters.

The base weights are frozen at their random initialization and every linear
layer carries a trainable low-rank adapter (B initialized to zero, so the
model starts out computing exactly the base function).  That mirrors the
shape of the full-scale recipe — adapter-only updates on all linear layers —
at a size where one epoch on a laptop is seconds, not days.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import torch
from torch import nn
from torch.nn import functional as F


@dataclass
class TinySpec:
    """Model-size override applied on top of the loaded training recipe.

    vocab_size None means "infer from the data" (max token id + 1).
    lora_r / lora_alpha / lora_dropout None mean "use the recipe's values".
    """

    vocab_size: int | None = None
    d_model: int = 128
    n_heads: int = 4
    n_layers: int = 2
    d_ff: int = 256
    max_seq_len: int = 2048
    param_budget: int = 20_000_000
    lora_r: int | None = None
    lora_alpha: int | None = None
    lora_dropout: float | None = None

    def validate(self) -> None:
        if self.d_model % self.n_heads:
            raise ValueError("d_model must be divisible by n_heads")
        for name in ("d_model", "n_heads", "n_layers", "d_ff", "max_seq_len"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be ≥ 1")


class LoraLinear(nn.Module):
    """Frozen linear layer plus a trainable rank-r update.

    y = W x + b + (alpha/r) * B (A (dropout x))
    """

    def __init__(
        self, in_features: int, out_features: int, r: int, alpha: int,
        dropout: float = 0.0, bias: bool = True,
    ):
        super().__init__()
        if r < 1:
            raise ValueError("adapter rank must be ≥ 1")
        self.base = nn.Linear(in_features, out_features, bias=bias)
        self.base.weight.requires_grad_(False)
        if bias:
            self.base.bias.requires_grad_(False)
        self.lora_a = nn.Parameter(torch.empty(r, in_features))
        self.lora_b = nn.Parameter(torch.zeros(out_features, r))
        nn.init.kaiming_uniform_(self.lora_a, a=math.sqrt(5))
        self.scaling = alpha / r
        self.dropout = nn.Dropout(dropout)

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        update = F.linear(F.linear(self.dropout(x), self.lora_a), self.lora_b)
        return self.base(x) + self.scaling * update


class _Block(nn.Module):
    def __init__(self, spec: TinySpec, r: int, alpha: int, dropout: float):
        super().__init__()
        d = spec.d_model
        self.n_heads = spec.n_heads
        self.ln1 = nn.LayerNorm(d)
        self.qkv = LoraLinear(d, 3 * d, r, alpha, dropout)
        self.proj = LoraLinear(d, d, r, alpha, dropout)
        self.ln2 = nn.LayerNorm(d)
        self.ff_in = LoraLinear(d, spec.d_ff, r, alpha, dropout)
        self.ff_out = LoraLinear(spec.d_ff, d, r, alpha, dropout)

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        b, t, d = x.shape
        h = self.ln1(x)
        q, k, v = self.qkv(h).split(d, dim=2)
        q = q.view(b, t, self.n_heads, -1).transpose(1, 2)
        k = k.view(b, t, self.n_heads, -1).transpose(1, 2)
        v = v.view(b, t, self.n_heads, -1).transpose(1, 2)
        att = F.scaled_dot_product_attention(q, k, v, is_causal=True)
        att = att.transpose(1, 2).reshape(b, t, d)
        x = x + self.proj(att)
        x = x + self.ff_out(F.gelu(self.ff_in(self.ln2(x))))
        return x


class TinyCausalLM(nn.Module):
    def __init__(self, vocab_size: int, spec: TinySpec, r: int, alpha: int,
                 dropout: float = 0.0):
        super().__init__()
        spec.validate()
        self.vocab_size = vocab_size
        self.max_seq_len = spec.max_seq_len
        self.tok_emb = nn.Embedding(vocab_size, spec.d_model)
        self.pos_emb = nn.Embedding(spec.max_seq_len, spec.d_model)
        self.blocks = nn.ModuleList(
            _Block(spec, r, alpha, dropout) for _ in range(spec.n_layers)
        )
        self.ln_f = nn.LayerNorm(spec.d_model)
        self.lm_head = LoraLinear(spec.d_model, vocab_size, r, alpha, dropout)
        # everything except the adapters stays frozen
        for name, p in self.named_parameters():
            if "lora_" not in name:
                p.requires_grad_(False)

    def forward(self, input_ids: torch.Tensor) -> torch.Tensor:
        b, t = input_ids.shape
        if t > self.max_seq_len:
            raise ValueError(f"sequence length {t} exceeds max {self.max_seq_len}")
        pos = torch.arange(t, device=input_ids.device)
        x = self.tok_emb(input_ids) + self.pos_emb(pos)[None]
        for block in self.blocks:
            x = block(x)
        return self.lm_head(self.ln_f(x))


def param_counts(model: nn.Module) -> tuple[int, int]:
    """(total, trainable) parameter counts."""
    total = sum(p.numel() for p in model.parameters())
    trainable = sum(p.numel() for p in model.parameters() if p.requires_grad)
    return total, trainable
