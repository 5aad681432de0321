from .chatformat import CHATML, ChatFormat, TurnSpan, load_chat_format, render_chat
from .masking import NoLearnableTokens, TrainingSample, tokenize_with_mask
from .mix import mix_and_shuffle
from .shards import ShardIntegrityError, load_shard_manifest, read_shards, write_shards
from .trainconfig import TRAIN_TABLE, TrainConfig, emit_train_config

__all__ = [
    "CHATML",
    "ChatFormat",
    "NoLearnableTokens",
    "ShardIntegrityError",
    "TRAIN_TABLE",
    "TrainConfig",
    "TrainingSample",
    "TurnSpan",
    "emit_train_config",
    "load_chat_format",
    "load_shard_manifest",
    "mix_and_shuffle",
    "read_shards",
    "render_chat",
    "tokenize_with_mask",
    "write_shards",
]
