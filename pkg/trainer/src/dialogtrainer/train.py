"""One-epoch adapter fine-tune over a verified shard directory.

The run loads a training recipe (TOML) and echoes it into the run manifest
byte-for-byte; everything the desk-scale setting changes — model size, the
optimizer implementation standing in for the paged 32-bit AdamW, zero warmup,
zero weight decay — is recorded under "overrides" instead of silently edited
into the recipe.  Checksums are verified before the model is even built.
"""

from __future__ import annotations

import csv
import json
import logging
import random
import sys
from dataclasses import dataclass, field
from pathlib import Path

import torch

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .data import masked_loss, to_batch
from .model import TinyCausalLM, TinySpec, param_counts
from .shards import load_manifest, load_samples, manifest_hash, verify

log = logging.getLogger("dialogtrainer")

MANIFEST_FILE = "run_manifest.json"
LOSS_CURVE_FILE = "loss_curve.csv"

# knobs the recipe file doesn't carry; fixed here and recorded in overrides
WARMUP_STEPS = 0
WEIGHT_DECAY = 0.0


class ConfigError(ValueError):
    pass


def load_train_config(path: str | Path) -> tuple[str, dict]:
    """Raw text (for byte-for-byte echo) plus parsed values."""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise ConfigError(f"cannot read training recipe {path}: {e}") from None
    try:
        cfg = tomllib.loads(text)
    except tomllib.TOMLDecodeError as e:
        raise ConfigError(f"{path} is not valid TOML: {e}") from None
    for key in (
        "lora_r", "lora_alpha", "lora_dropout", "learning_rate",
        "gradient_accumulation_steps", "mini_batch_size", "epochs",
        "optimizer", "lr_scheduler", "sequence_length",
    ):
        if key not in cfg:
            raise ConfigError(f"{path} is missing required key {key!r}")
    if cfg["mini_batch_size"] != 1:
        raise ConfigError(
            "this trainer runs unpadded single-sample micro-batches; "
            f"mini_batch_size must be 1, got {cfg['mini_batch_size']}"
        )
    if cfg["lr_scheduler"] != "Cosine":
        raise ConfigError(f"unsupported lr_scheduler {cfg['lr_scheduler']!r}")
    return text, cfg


@dataclass
class RunManifest:
    """Everything needed to audit a smoke-train run."""

    config_text: str
    config: dict
    overrides: dict
    shard_manifest_sha256: str
    shard_config_hash: str
    n_samples: int
    n_trained: int
    n_skipped: int
    seed: int
    initial_loss: float
    final_loss: float
    loss_series: list[float]
    # per-micro-batch (step index, optimizer step index, loss); CSV only
    micro_losses: list[tuple[int, int, float]] = field(default_factory=list, repr=False)

    def as_dict(self) -> dict:
        return {
            "config_text": self.config_text,
            "config": self.config,
            "overrides": self.overrides,
            "shard_manifest_sha256": self.shard_manifest_sha256,
            "shard_config_hash": self.shard_config_hash,
            "n_samples": self.n_samples,
            "n_trained": self.n_trained,
            "n_skipped": self.n_skipped,
            "seed": self.seed,
            "initial_loss": self.initial_loss,
            "final_loss": self.final_loss,
            "loss_series": self.loss_series,
        }

    def save(self, out_dir: str | Path) -> Path:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        path = out / MANIFEST_FILE
        path.write_text(
            json.dumps(self.as_dict(), indent=2, ensure_ascii=False) + "\n",
            encoding="utf-8",
        )
        with open(out / LOSS_CURVE_FILE, "w", newline="", encoding="utf-8") as f:
            w = csv.writer(f)
            w.writerow(["micro_step", "opt_step", "loss"])
            w.writerows(self.micro_losses)
        return path


def evaluate(model: TinyCausalLM, batches: list[dict]) -> float:
    """Global token-mean loss over every unmasked position in the set."""
    model.eval()
    total, count = 0.0, 0
    with torch.no_grad():
        for b in batches:
            loss_sum, n = masked_loss(model(b["input_ids"]), b["labels"], b["label_mask"])
            total += float(loss_sum)
            count += n
    if count == 0:
        raise ValueError("no learnable positions to evaluate")
    return total / count


def smoke_train(
    shard_dir: str | Path,
    config_path: str | Path,
    spec: TinySpec | None = None,
    seed: int = 0,
    out_dir: str | Path | None = None,
) -> RunManifest:
    """Verify shards, fine-tune adapters for the configured epochs, report.

    Raises ShardError before any model work if the shard directory fails
    checksum verification, and ValueError if the built model would exceed
    the parameter budget.
    """
    spec = spec if spec is not None else TinySpec()
    spec.validate()

    # integrity first: nothing is built off unverified bytes
    shard_manifest = verify(shard_dir, load_manifest(shard_dir))
    _, records = load_samples(shard_dir)
    if not records:
        raise ValueError(f"shard directory {shard_dir} holds no samples")

    config_text, cfg = load_train_config(config_path)

    torch.manual_seed(seed)
    vocab_size = spec.vocab_size or max(max(r["tokens"]) for r in records) + 1
    r = spec.lora_r if spec.lora_r is not None else cfg["lora_r"]
    alpha = spec.lora_alpha if spec.lora_alpha is not None else cfg["lora_alpha"]
    dropout = (
        spec.lora_dropout if spec.lora_dropout is not None else float(cfg["lora_dropout"])
    )
    model = TinyCausalLM(vocab_size, spec, r=r, alpha=alpha, dropout=dropout)
    total_params, trainable_params = param_counts(model)
    if total_params > spec.param_budget:
        raise ValueError(
            f"model has {total_params} parameters, budget is {spec.param_budget}"
        )

    max_len = min(int(cfg["sequence_length"]), spec.max_seq_len)
    batches = []
    skipped = 0
    for rec in records:
        b = to_batch(rec, max_len)
        if b is None:
            skipped += 1
        else:
            batches.append(b)
    if not batches:
        raise ValueError("every sample lost its learnable positions to truncation")
    log.info("training on %d samples (%d skipped), %d/%d params trainable",
             len(batches), skipped, trainable_params, total_params)

    initial_loss = evaluate(model, batches)

    accum = int(cfg["gradient_accumulation_steps"])
    epochs = int(cfg["epochs"])
    order = list(range(len(batches)))
    rng = random.Random(seed)
    n_micro_total = len(batches) * epochs
    n_opt_steps = (n_micro_total + accum - 1) // accum

    opt = torch.optim.AdamW(
        (p for p in model.parameters() if p.requires_grad),
        lr=float(cfg["learning_rate"]), weight_decay=WEIGHT_DECAY,
    )
    sched = torch.optim.lr_scheduler.CosineAnnealingLR(opt, T_max=n_opt_steps)

    model.train()
    loss_series: list[float] = []
    micro_losses: list[tuple[int, int, float]] = []
    group: list[float] = []
    micro_step = 0

    def step_group() -> None:
        opt.step()
        sched.step()
        opt.zero_grad(set_to_none=True)
        loss_series.append(sum(group) / len(group))
        group.clear()

    for _ in range(epochs):
        rng.shuffle(order)
        for i in order:
            b = batches[i]
            loss_sum, n = masked_loss(model(b["input_ids"]), b["labels"], b["label_mask"])
            sample_loss = loss_sum / n
            # the trailing group may run short; scale so the step is its mean
            group_start = micro_step // accum * accum
            group_size = min(accum, n_micro_total - group_start)
            (sample_loss / group_size).backward()
            micro_step += 1
            group.append(float(sample_loss.detach()))
            micro_losses.append((micro_step, len(loss_series) + 1, group[-1]))
            if len(group) == accum:
                step_group()
    if group:
        step_group()

    final_loss = evaluate(model, batches)

    manifest = RunManifest(
        config_text=config_text,
        config=cfg,
        overrides={
            "model": {
                "vocab_size": vocab_size,
                "d_model": spec.d_model,
                "n_heads": spec.n_heads,
                "n_layers": spec.n_layers,
                "d_ff": spec.d_ff,
                "max_seq_len": spec.max_seq_len,
                "effective_sequence_length": max_len,
                "total_parameters": total_params,
                "trainable_parameters": trainable_params,
                "lora_r_used": r,
                "lora_alpha_used": alpha,
                "lora_dropout_used": dropout,
            },
            "optimizer_impl": "torch.optim.AdamW",
            "lr_scheduler_impl": "torch.optim.lr_scheduler.CosineAnnealingLR",
            "warmup_steps": WARMUP_STEPS,
            "weight_decay": WEIGHT_DECAY,
            "device": "cpu",
        },
        shard_manifest_sha256=manifest_hash(shard_dir),
        shard_config_hash=str(shard_manifest.get("config_hash", "")),
        n_samples=len(records),
        n_trained=len(batches),
        n_skipped=skipped,
        seed=seed,
        initial_loss=initial_loss,
        final_loss=final_loss,
        loss_series=loss_series,
        micro_losses=micro_losses,
    )
    if out_dir is not None:
        manifest.save(out_dir)
    return manifest
