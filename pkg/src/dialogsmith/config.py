"""TOML run configuration: strict keys, stage sections, stable hashing.

Unknown keys are hard errors naming the offending key — a typo like
`n_dialogs_per_doc` silently falling back to a default would produce a
subtly wrong dataset, which is the worst possible failure mode for a
pipeline whose outputs feed week-long training runs.  The config hash is
a sha256 over the canonical JSON of the fully merged config and is stamped
into every manifest and report an invocation produces.
"""

from __future__ import annotations

import hashlib
import json
from pathlib import Path

try:
    import tomllib  # py311+
except ModuleNotFoundError:  # pragma: no cover - depends on interpreter
    import tomli as tomllib


class ConfigError(ValueError):
    pass


# section -> {key: default}; None means "no default, optional"
SCHEMA: dict = {
    "": {
        "seed": 0,
        "output_root": "out",
    },
    "corpus": {
        "documents": None,
        "document_format": "structured_record",
        "conversations": None,
        "max_tokens": 4096,
        "require_english": True,
        "english_confidence": 0.8,
        "vocab": None,
        "merges": None,
    },
    "dbke": {
        "template": "dialogue_default",
        "n_dialogues_per_doc": 5,
        "max_attempts": 3,
        "temperature": 0.7,
        "max_output_tokens": 1024,
        "min_exchanges": 3,
        "stub_transcripts": None,
    },
    "retrieval": {
        "pool": None,
        "pool_benchmark": "medqa",
        "n_items": 4000,
        "sample_seed": 0,
        "k_passages": 3,
        "template": "qa_justify",
        "max_attempts": 3,
    },
    "client": {
        "endpoint": "http://localhost:8000/v1",
        "model": "",
        "auth_env": "MODEL_API_KEY",
        "auth_token_file": None,
        "max_in_flight": 4,
        "requests_per_minute": 60,
        "max_retries": 3,
        "base_backoff": 0.5,
        "cache_dir": None,
        "timeout": 120.0,
    },
    "emit": {
        "shard_size": 1000,
        "max_len": 4096,
        "chat_format": None,
        "variants": ["13B", "70B"],
        "include": ["corpus", "dbke", "qa"],
    },
    "eval": {
        "benchmark": None,
        "path": None,
        "dev_path": None,
        "k": 0,
        "normalization": "raw_sum",
        "continuation_style": "letter",
        "stub": None,
        "stub_seed": 0,
        "model_id": "local",
        "expected_count": None,
    },
    "note": {
        "dialogue": None,
        "stub_reply": None,
    },
}


def _check_keys(given: dict, section: str) -> None:
    allowed = SCHEMA[section]
    for key in given:
        if section == "" and key in SCHEMA and isinstance(given[key], dict):
            continue  # a known section table
        if key not in allowed:
            where = f"[{section}] " if section else ""
            raise ConfigError(f"unknown config key: {where}{key}")


class RunConfig:
    def __init__(self, raw: dict):
        _check_keys(raw, "")
        self.raw = raw
        merged: dict = {}
        for key, default in SCHEMA[""].items():
            merged[key] = raw.get(key, default)
        for section, keys in SCHEMA.items():
            if not section:
                continue
            given = raw.get(section, {})
            if not isinstance(given, dict):
                raise ConfigError(f"config section [{section}] must be a table")
            _check_keys(given, section)
            merged[section] = {k: given.get(k, d) for k, d in keys.items()}
        self.data = merged

    @classmethod
    def load(cls, path: str | Path) -> "RunConfig":
        p = Path(path)
        try:
            raw = tomllib.loads(p.read_text(encoding="utf-8"))
        except tomllib.TOMLDecodeError as e:
            raise ConfigError(f"{p}: not valid TOML: {e}") from None
        return cls(raw)

    def __getitem__(self, key: str):
        return self.data[key]

    @property
    def seed(self) -> int:
        return int(self.data["seed"])

    @property
    def output_root(self) -> Path:
        return Path(self.data["output_root"])

    def override(self, dotted: str, value) -> None:
        """Apply a CLI override like ('client.endpoint', url)."""
        if "." in dotted:
            section, key = dotted.split(".", 1)
            if section not in SCHEMA or key not in SCHEMA[section]:
                raise ConfigError(f"unknown config key: [{section}] {key}")
            self.data[section][key] = value
        else:
            if dotted not in SCHEMA[""]:
                raise ConfigError(f"unknown config key: {dotted}")
            self.data[dotted] = value

    def hash(self) -> str:
        canon = json.dumps(self.data, sort_keys=True, ensure_ascii=False, default=str)
        return hashlib.sha256(canon.encode("utf-8")).hexdigest()


def config_hash_of(data: dict) -> str:
    canon = json.dumps(data, sort_keys=True, ensure_ascii=False, default=str)
    return hashlib.sha256(canon.encode("utf-8")).hexdigest()
