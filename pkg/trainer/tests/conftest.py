from pathlib import Path

import pytest

from dialogtrainer.model import TinySpec

from shardgen import make_records, write_raw_shards

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture(scope="session")
def fixtures_dir() -> Path:
    return FIXTURES


@pytest.fixture(scope="session")
def shards100() -> Path:
    return FIXTURES / "shards100"


@pytest.fixture(scope="session")
def config_13b() -> Path:
    return FIXTURES / "train_config_13B.toml"


@pytest.fixture
def small_spec() -> TinySpec:
    """Sub-second model for unit tests; acceptance uses the default spec."""
    return TinySpec(d_model=32, n_heads=2, n_layers=1, d_ff=64, max_seq_len=128)


@pytest.fixture
def tiny_shards(tmp_path) -> Path:
    d = tmp_path / "shards"
    write_raw_shards(d, make_records(12, seed=5))
    return d
