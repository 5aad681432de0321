"""Desk-scale verifier for emitted dialogue training shards."""

from .data import IGNORE_INDEX, masked_loss, to_batch
from .model import LoraLinear, TinyCausalLM, TinySpec, param_counts
from .shards import ShardError, load_manifest, load_samples, manifest_hash, verify
from .train import ConfigError, RunManifest, load_train_config, smoke_train

__all__ = [
    "IGNORE_INDEX", "masked_loss", "to_batch",
    "LoraLinear", "TinyCausalLM", "TinySpec", "param_counts",
    "ShardError", "load_manifest", "load_samples", "manifest_hash", "verify",
    "ConfigError", "RunManifest", "load_train_config", "smoke_train",
]
