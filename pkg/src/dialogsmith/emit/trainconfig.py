"""Fine-tuning recipe files for the 13B / 70B adapter training runs.

The two variants share everything except learning rate and gradient
accumulation.  Values are emitted as a flat TOML document with a fixed key
order and fixed literal formatting ("0.00" stays "0.00"), so the file can
be both byte-compared against goldens and parsed by any TOML reader.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

from ..jsonlio import atomic_write_text

VARIANTS = ("13B", "70B")

# variant -> (gradient_accumulation_steps, learning_rate literal)
_VARIANT_DIFFS = {"13B": (16, "0.0002"), "70B": (32, "0.0001")}


@dataclass
class TrainConfig:
    variant: str
    sequence_length: int = 4096
    lora_r: int = 64
    lora_alpha: int = 16
    lora_dropout: str = "0.00"
    lora_target_modules: str = "All linear layers"
    gradient_accumulation_steps: int = 16
    mini_batch_size: int = 1
    epochs: int = 1
    optimizer: str = "paged_adamw_32bit"
    lr_scheduler: str = "Cosine"
    learning_rate: str = "0.0002"

    def to_toml(self) -> str:
        return (
            f'variant = "{self.variant}"\n'
            f"sequence_length = {self.sequence_length}\n"
            f"lora_r = {self.lora_r}\n"
            f"lora_alpha = {self.lora_alpha}\n"
            f"lora_dropout = {self.lora_dropout}\n"
            f'lora_target_modules = "{self.lora_target_modules}"\n'
            f"gradient_accumulation_steps = {self.gradient_accumulation_steps}\n"
            f"mini_batch_size = {self.mini_batch_size}\n"
            f"epochs = {self.epochs}\n"
            f'optimizer = "{self.optimizer}"\n'
            f'lr_scheduler = "{self.lr_scheduler}"\n'
            f"learning_rate = {self.learning_rate}\n"
        )


def train_config(variant: str) -> TrainConfig:
    if variant not in VARIANTS:
        raise ValueError(f"unknown variant {variant!r}; expected one of {VARIANTS}")
    accum, lr = _VARIANT_DIFFS[variant]
    return TrainConfig(
        variant=variant, gradient_accumulation_steps=accum, learning_rate=lr
    )


TRAIN_TABLE = {v: train_config(v) for v in VARIANTS}


def emit_train_config(variant: str, path: str | Path | None = None) -> str:
    text = train_config(variant).to_toml()
    if path is not None:
        atomic_write_text(path, text)
    return text
