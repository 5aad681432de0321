"""Turn shard records into next-token batches with a label mask.

Loss positions are decided by the emitted mask alone: position i contributes
iff mask[i] == 1, and the model at position i-1 predicts token i.  Masked-out
labels are replaced with an ignore sentinel *inside* the loss, so whatever
value they held can never reach the objective — that is the property the
perturbation tests pin down.
"""

from __future__ import annotations

import torch
from torch.nn import functional as F

IGNORE_INDEX = -100


def to_batch(rec: dict, max_len: int) -> dict | None:
    """Shift a record into (input_ids, labels, label_mask), all [1, T-1].

    Returns None when truncation leaves nothing learnable; callers count
    those instead of training on empty sequences.
    """
    tokens = rec["tokens"][:max_len]
    mask = rec["mask"][:max_len]
    if len(tokens) < 2:
        return None
    label_mask = torch.tensor(mask[1:], dtype=torch.bool)[None]
    if not bool(label_mask.any()):
        return None
    return {
        "input_ids": torch.tensor(tokens[:-1], dtype=torch.long)[None],
        "labels": torch.tensor(tokens[1:], dtype=torch.long)[None],
        "label_mask": label_mask,
        "source_ref": rec.get("source_ref", ""),
    }


def masked_loss(
    logits: torch.Tensor, labels: torch.Tensor, label_mask: torch.Tensor
) -> tuple[torch.Tensor, int]:
    """Summed cross entropy over unmasked label positions.

    Returns (loss_sum, n_positions) so callers can choose the normalizer
    (per-sample mean for optimization, global token mean for reporting).
    """
    guarded = labels.masked_fill(~label_mask, IGNORE_INDEX)
    loss_sum = F.cross_entropy(
        logits.flatten(0, 1), guarded.flatten(),
        ignore_index=IGNORE_INDEX, reduction="sum",
    )
    return loss_sum, int(label_mask.sum())
