import csv
import json

import pytest

from dialogtrainer import ConfigError, ShardError, load_train_config, smoke_train
from dialogtrainer.cli import main
from dialogtrainer.train import LOSS_CURVE_FILE, MANIFEST_FILE

from shardgen import make_records, write_raw_shards

HOT_RECIPE = """\
variant = "unit"
sequence_length = 128
lora_r = 4
lora_alpha = 8
lora_dropout = 0.00
lora_target_modules = "All linear layers"
gradient_accumulation_steps = 4
mini_batch_size = 1
epochs = 2
optimizer = "paged_adamw_32bit"
lr_scheduler = "Cosine"
learning_rate = 0.01
"""


@pytest.fixture
def hot_config(tmp_path):
    p = tmp_path / "recipe.toml"
    p.write_text(HOT_RECIPE)
    return p


def test_load_emitted_config(config_13b):
    text, cfg = load_train_config(config_13b)
    assert text == config_13b.read_text(encoding="utf-8")
    assert cfg["lora_r"] == 64
    assert cfg["learning_rate"] == 0.0002
    assert cfg["optimizer"] == "paged_adamw_32bit"
    assert cfg["lr_scheduler"] == "Cosine"
    assert cfg["gradient_accumulation_steps"] == 16
    assert cfg["epochs"] == 1


@pytest.mark.parametrize(
    "drop, add, msg",
    [
        ("learning_rate", "learning_rate = 0.01", None),  # control: still loads
        ("epochs", None, "missing required key"),
        ("mini_batch_size", "mini_batch_size = 2", "mini_batch_size must be 1"),
        ("lr_scheduler", 'lr_scheduler = "Linear"', "unsupported lr_scheduler"),
    ],
)
def test_config_validation(tmp_path, drop, add, msg):
    lines = [ln for ln in HOT_RECIPE.splitlines() if not ln.startswith(drop + " ")]
    if add:
        lines.append(add)
    p = tmp_path / "c.toml"
    p.write_text("\n".join(lines) + "\n")
    if msg is None:
        load_train_config(p)
    else:
        with pytest.raises(ConfigError, match=msg):
            load_train_config(p)


def test_config_bad_toml_and_missing_file(tmp_path):
    p = tmp_path / "c.toml"
    p.write_text("not == toml")
    with pytest.raises(ConfigError, match="not valid TOML"):
        load_train_config(p)
    with pytest.raises(ConfigError, match="cannot read"):
        load_train_config(tmp_path / "absent.toml")


def test_run_echoes_config_and_records_overrides(tiny_shards, config_13b, small_spec):
    m = smoke_train(tiny_shards, config_13b, spec=small_spec, seed=1)
    assert m.config_text == config_13b.read_text(encoding="utf-8")
    assert m.config["lora_r"] == 64
    assert m.config["optimizer"] == "paged_adamw_32bit"
    ov = m.overrides
    assert ov["optimizer_impl"] == "torch.optim.AdamW"
    assert ov["warmup_steps"] == 0
    assert ov["weight_decay"] == 0.0
    assert ov["model"]["d_model"] == 32
    assert ov["model"]["lora_r_used"] == 64
    assert ov["model"]["vocab_size"] == 16
    # recipe says 4096 but the tiny model caps the window
    assert ov["model"]["effective_sequence_length"] == 128
    assert m.shard_config_hash == "test"
    assert len(m.shard_manifest_sha256) == 64
    assert m.n_samples == m.n_trained == 12
    assert m.n_skipped == 0


def test_spec_can_override_adapter_shape(tiny_shards, config_13b, small_spec):
    small_spec.lora_r = 2
    small_spec.lora_alpha = 4
    m = smoke_train(tiny_shards, config_13b, spec=small_spec, seed=1)
    assert m.config["lora_r"] == 64  # echo untouched
    assert m.overrides["model"]["lora_r_used"] == 2
    assert m.overrides["model"]["lora_alpha_used"] == 4


def test_deterministic_given_seed(tiny_shards, hot_config, small_spec):
    a = smoke_train(tiny_shards, hot_config, spec=small_spec, seed=3)
    b = smoke_train(tiny_shards, hot_config, spec=small_spec, seed=3)
    assert a.loss_series == b.loss_series
    assert a.initial_loss == b.initial_loss
    assert a.final_loss == b.final_loss
    c = smoke_train(tiny_shards, hot_config, spec=small_spec, seed=4)
    assert c.loss_series != a.loss_series


def test_hot_recipe_learns(tiny_shards, hot_config, small_spec):
    m = smoke_train(tiny_shards, hot_config, spec=small_spec, seed=0)
    assert m.final_loss < m.initial_loss - 0.01
    # 12 samples x 2 epochs, groups of 4
    assert len(m.loss_series) == 6
    assert len(m.micro_losses) == 24


def test_corrupt_shard_aborts_without_artifacts(tmp_path, hot_config, small_spec):
    d = tmp_path / "s"
    write_raw_shards(d, make_records(6))
    p = d / "shard-00000.jsonl"
    p.write_bytes(p.read_bytes().replace(b'"test"', b'"oops"'))
    out = tmp_path / "run"
    with pytest.raises(ShardError, match="checksum mismatch"):
        smoke_train(d, hot_config, spec=small_spec, out_dir=out)
    assert not (out / MANIFEST_FILE).exists()


def test_artifacts_written(tmp_path, tiny_shards, hot_config, small_spec):
    out = tmp_path / "run"
    m = smoke_train(tiny_shards, hot_config, spec=small_spec, seed=2, out_dir=out)
    saved = json.loads((out / MANIFEST_FILE).read_text())
    assert saved["config_text"] == hot_config.read_text(encoding="utf-8")
    assert saved["loss_series"] == m.loss_series
    assert saved["initial_loss"] == m.initial_loss
    with open(out / LOSS_CURVE_FILE, newline="") as f:
        rows = list(csv.DictReader(f))
    assert len(rows) == len(m.micro_losses) == 24
    assert rows[0]["micro_step"] == "1"
    assert max(int(r["opt_step"]) for r in rows) == len(m.loss_series)
    assert all(float(r["loss"]) > 0 for r in rows)


def test_param_budget_enforced(tiny_shards, hot_config, small_spec):
    small_spec.param_budget = 1000
    with pytest.raises(ValueError, match="budget"):
        smoke_train(tiny_shards, hot_config, spec=small_spec)


def test_unlearnable_samples_are_skipped(tmp_path, hot_config, small_spec):
    recs = make_records(5, seed=2)
    recs[2]["mask"] = [0] * len(recs[2]["tokens"])
    d = tmp_path / "s"
    write_raw_shards(d, recs)
    m = smoke_train(d, hot_config, spec=small_spec)
    assert m.n_samples == 5
    assert m.n_trained == 4
    assert m.n_skipped == 1


def test_empty_shard_dir_rejected(tmp_path, hot_config, small_spec):
    d = tmp_path / "s"
    write_raw_shards(d, [])
    with pytest.raises(ValueError, match="no samples"):
        smoke_train(d, hot_config, spec=small_spec)


def test_cli_end_to_end(tmp_path, tiny_shards, hot_config, capsys):
    out = tmp_path / "run"
    rc = main([
        "--shards", str(tiny_shards), "--config", str(hot_config),
        "--out", str(out), "--seed", "1",
        "--d-model", "32", "--heads", "2", "--layers", "1", "--ffn", "64",
        "--max-seq-len", "128",
    ])
    assert rc == 0
    assert (out / MANIFEST_FILE).exists()
    assert (out / LOSS_CURVE_FILE).exists()
    stdout = capsys.readouterr().out
    assert "trained 12 samples" in stdout
    assert "loss" in stdout


def test_cli_reports_failures(tmp_path, tiny_shards, hot_config, caplog):
    rc = main([
        "--shards", str(tmp_path / "nowhere"), "--config", str(hot_config),
        "--out", str(tmp_path / "run"),
    ])
    assert rc == 1
    assert "no shard manifest" in caplog.text
    rc = main([
        "--shards", str(tiny_shards), "--config", str(tmp_path / "absent.toml"),
        "--out", str(tmp_path / "run2"),
    ])
    assert rc == 1
    assert "cannot read" in caplog.text
