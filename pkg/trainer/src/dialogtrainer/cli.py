"""Command-line front end: dialogtrainer --shards DIR --config FILE --out DIR."""

from __future__ import annotations

import argparse
import logging
import sys

from .model import TinySpec
from .shards import ShardError
from .train import ConfigError, smoke_train


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="dialogtrainer",
        description="Adapter smoke-train over an emitted shard directory.",
    )
    p.add_argument("--shards", required=True, help="shard directory (with shards.json)")
    p.add_argument("--config", required=True, help="training recipe TOML")
    p.add_argument("--out", required=True, help="output directory for run manifest + loss curve")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--d-model", type=int, default=128)
    p.add_argument("--heads", type=int, default=4)
    p.add_argument("--layers", type=int, default=2)
    p.add_argument("--ffn", type=int, default=256)
    p.add_argument("--max-seq-len", type=int, default=2048)
    p.add_argument("--vocab-size", type=int, default=None,
                   help="default: inferred from the data")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(levelname)s %(name)s: %(message)s",
    )
    spec = TinySpec(
        vocab_size=args.vocab_size, d_model=args.d_model, n_heads=args.heads,
        n_layers=args.layers, d_ff=args.ffn, max_seq_len=args.max_seq_len,
    )
    try:
        manifest = smoke_train(
            args.shards, args.config, spec=spec, seed=args.seed, out_dir=args.out,
        )
    except (ShardError, ConfigError, ValueError) as e:
        logging.getLogger("dialogtrainer").error("%s", e)
        return 1
    print(
        f"trained {manifest.n_trained} samples "
        f"({manifest.n_skipped} skipped) over {len(manifest.loss_series)} steps; "
        f"loss {manifest.initial_loss:.4f} -> {manifest.final_loss:.4f}"
    )
    print(f"run manifest: {args.out}/run_manifest.json")
    return 0


if __name__ == "__main__":
    sys.exit(main())
