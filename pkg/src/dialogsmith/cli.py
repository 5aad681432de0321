"""Command-line entry point: one subcommand per pipeline stage.

    dialogsmith ingest    --config run.toml      documents + chat-log prep
    dialogsmith transform --config run.toml      doc -> dialogue generation
    dialogsmith qa        --config run.toml      MC items -> justification dialogues
    dialogsmith emit      --config run.toml      masked shards + train configs
    dialogsmith eval      --config run.toml      benchmark accuracy via scoring
    dialogsmith report    --config run.toml      comparison tables (md + csv)
    dialogsmith note      --config run.toml      dialogue -> clinical note demo

Every stage writes a manifest carrying the config hash; re-running a
finished stage with an unchanged config is a no-op.  Exit codes: 0 ok,
1 validation/config problems, 2 transport problems.  Logs go to stderr;
machine-readable output goes to files only.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from .client.base import (
    AuthError,
    CapabilityError,
    ChatRequest,
    ClientConfig,
    RetryPolicy,
    TransportError,
)
from .client.core import ModelClient
from .client.stub import GoldFavoringScorer, SeededRandomScorer, StubTeacher
from .config import ConfigError, RunConfig
from .corpus.ingest import IngestSkip, filter_dialogues, ingest_documents, load_sharegpt
from .corpus.model import Document, Turn
from .corpus.segment import segment_conversation
from .corpus.tokenizer import ByteBpeTokenizer
from .dbke.parsing import parse_dialogue, render_dialogue_lines
from .dbke.pipeline import (
    CheckpointError,
    GenerationParams,
    collect_dialogues,
    run_pipeline,
)
from .dbke.templates import PromptTemplate, TemplateError, builtin_template, load_template
from .dbke.validation import ValidationPolicy
from .emit.chatformat import CHATML, load_chat_format
from .emit.masking import NoLearnableTokens, tokenize_with_mask
from .emit.mix import mix_and_shuffle
from .emit.shards import write_shards
from .emit.trainconfig import emit_train_config
from .evalharness.benchmarks import BenchmarkFormatError, load_benchmark
from .evalharness.report import EvalReport, render_report
from .evalharness.scoring import EvalConfig, evaluate
from .evalharness.shots import ShotSet, build_kshot
from .jsonlio import (
    atomic_write_json,
    atomic_write_text,
    read_dialogues,
    read_jsonl,
    write_dialogues,
    write_jsonl,
)
from .retrieval import build_index, qa_batch, sample_items

log = logging.getLogger("dialogsmith")

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_TRANSPORT = 2


# -- shared plumbing ---------------------------------------------------------

def _load_config(args) -> RunConfig:
    cfg = RunConfig.load(args.config)
    if getattr(args, "seed", None) is not None:
        cfg.override("seed", args.seed)
    if getattr(args, "endpoint", None):
        cfg.override("client.endpoint", args.endpoint)
    if getattr(args, "cache_dir", None):
        cfg.override("client.cache_dir", args.cache_dir)
    return cfg


def _tokenizer(cfg: RunConfig) -> ByteBpeTokenizer:
    vocab = cfg["corpus"]["vocab"]
    merges = cfg["corpus"]["merges"]
    if vocab and merges:
        return ByteBpeTokenizer.from_files(vocab, merges)
    log.info("no vocab/merges configured; using byte-fallback tokenizer")
    return ByteBpeTokenizer.bytes_only()


def _template(name_or_path: str) -> PromptTemplate:
    p = Path(name_or_path)
    if p.suffix == ".tmpl" or p.exists():
        return load_template(p)
    return builtin_template(name_or_path)


def _client_config(cfg: RunConfig) -> ClientConfig:
    c = cfg["client"]
    return ClientConfig(
        endpoint=c["endpoint"],
        model=c["model"],
        auth_env=c["auth_env"],
        auth_token_file=c["auth_token_file"],
        max_in_flight=int(c["max_in_flight"]),
        requests_per_minute=int(c["requests_per_minute"]),
        retry=RetryPolicy(
            max_retries=int(c["max_retries"]), base_backoff=float(c["base_backoff"])
        ),
        cache_dir=c["cache_dir"],
        timeout=float(c["timeout"]),
    )


def _teacher(cfg: RunConfig):
    stub_dir = cfg["dbke"]["stub_transcripts"]
    if stub_dir:
        transcripts = [
            p.read_text(encoding="utf-8") for p in sorted(Path(stub_dir).glob("*.txt"))
        ]
        if not transcripts:
            raise ConfigError(f"no *.txt transcripts under {stub_dir}")
        log.info("using stub teacher with %d transcripts", len(transcripts))
        return StubTeacher(transcripts)
    return ModelClient(_client_config(cfg), require=("chat",))


def _stage_is_done(stage_dir: Path, manifest_name: str, config_hash: str) -> bool:
    path = stage_dir / manifest_name
    if not path.exists():
        return False
    try:
        recorded = json.loads(path.read_text(encoding="utf-8")).get("config_hash")
    except json.JSONDecodeError:
        return False
    return recorded == config_hash


def _docs_from_records(path: Path) -> list[Document]:
    docs = []
    for rec in read_jsonl(path):
        docs.append(
            Document(
                id=rec["id"],
                source=rec.get("source", "generic"),
                title=rec.get("title", ""),
                body=rec["body"],
                year=rec.get("year"),
                meta=rec.get("meta", {}),
            )
        )
    return docs


# -- stages ------------------------------------------------------------------

def cmd_ingest(args) -> int:
    cfg = _load_config(args)
    out = cfg.output_root / "corpus"
    if not args.restart and _stage_is_done(out, "ingest_manifest.json", cfg.hash()):
        log.info("ingest already complete for this config; nothing to do")
        return EXIT_OK
    out.mkdir(parents=True, exist_ok=True)
    c = cfg["corpus"]
    manifest: dict = {"config_hash": cfg.hash()}

    if c["documents"]:
        skips: list[IngestSkip] = []
        docs = list(
            ingest_documents([c["documents"]], c["document_format"], skips=skips)
        )
        write_jsonl(
            out / "documents.jsonl",
            (
                {
                    "id": d.id,
                    "source": d.source,
                    "title": d.title,
                    "body": d.body,
                    "year": d.year,
                    "meta": d.meta,
                }
                for d in docs
            ),
        )
        manifest["documents"] = {
            "kept": len(docs),
            "skipped": len(skips),
            "skip_reasons": sorted({s.reason for s in skips}),
        }
        log.info("documents: %d kept, %d skipped", len(docs), len(skips))

    if c["conversations"]:
        tok = _tokenizer(cfg)
        raw = load_sharegpt(c["conversations"])
        kept, stats = filter_dialogues(
            raw,
            require_english=bool(c["require_english"]),
            english_confidence=float(c["english_confidence"]),
        )
        segments = []
        for dlg in kept:
            segments.extend(segment_conversation(dlg, int(c["max_tokens"]), tok))
        write_dialogues(out / "conversations.jsonl", segments)
        manifest["conversations"] = dict(stats.as_dict(), segments=len(segments))
        log.info(
            "conversations: %d kept of %d, %d segments",
            stats.kept, stats.seen, len(segments),
        )

    atomic_write_json(out / "ingest_manifest.json", manifest)
    return EXIT_OK


def cmd_transform(args) -> int:
    cfg = _load_config(args)
    docs_path = cfg.output_root / "corpus" / "documents.jsonl"
    if not docs_path.exists():
        raise ConfigError(
            f"{docs_path} not found — run `dialogsmith ingest` first or point "
            "[corpus] documents at your article records"
        )
    docs = _docs_from_records(docs_path)
    d = cfg["dbke"]
    params = GenerationParams(
        temperature=float(d["temperature"]),
        max_output_tokens=int(d["max_output_tokens"]),
        n_dialogues_per_doc=int(d["n_dialogues_per_doc"]),
        max_attempts=int(d["max_attempts"]),
        seed=cfg.seed,
    )
    policy = ValidationPolicy(min_exchanges=int(d["min_exchanges"]))
    out = cfg.output_root / "dbke"
    manifest = run_pipeline(
        docs,
        _template(d["template"]),
        _teacher(cfg),
        params,
        out,
        config_hash=cfg.hash(),
        policy=policy,
        restart=args.restart,
    )
    write_dialogues(out / "dialogues.jsonl", collect_dialogues(out, manifest))
    log.info(
        "transform: %d accepted, %d rejected, avg %.2f exchanges",
        manifest.accepted, manifest.rejected, manifest.achieved_avg_exchanges(),
    )
    return EXIT_OK


def cmd_qa(args) -> int:
    cfg = _load_config(args)
    r = cfg["retrieval"]
    if not r["pool"]:
        raise ConfigError("[retrieval] pool is required for the qa stage")
    out = cfg.output_root / "qa"
    if not args.restart and _stage_is_done(out, "qa_manifest.json", cfg.hash()):
        log.info("qa already complete for this config; nothing to do")
        return EXIT_OK
    pool = load_benchmark(r["pool_benchmark"], r["pool"])
    items = sample_items(pool, int(r["n_items"]), int(r["sample_seed"]))

    docs_path = cfg.output_root / "corpus" / "documents.jsonl"
    ix = None
    docs_by_id: dict = {}
    if docs_path.exists():
        docs = _docs_from_records(docs_path)
        if docs:
            ix = build_index(docs)
            docs_by_id = {doc.id: doc for doc in docs}
    else:
        log.warning("no ingested documents; qa dialogues will cite no articles")

    result = qa_batch(
        items,
        ix,
        docs_by_id,
        _teacher(cfg),
        _template(r["template"]),
        k_passages=int(r["k_passages"]),
        max_attempts=int(r["max_attempts"]),
        seed=cfg.seed,
    )
    out.mkdir(parents=True, exist_ok=True)
    write_dialogues(out / "dialogues.jsonl", result.accepted)
    atomic_write_json(
        out / "qa_manifest.json",
        {
            "config_hash": cfg.hash(),
            "sampled": len(items),
            "accepted": len(result.accepted),
            "rejected": len(result.rejected_ids),
            "rejected_ids": result.rejected_ids,
        },
    )
    log.info("qa: %d accepted, %d rejected", len(result.accepted), len(result.rejected_ids))
    return EXIT_OK


_EMIT_SOURCES = {
    "corpus": ("corpus", "conversations.jsonl"),
    "dbke": ("dbke", "dialogues.jsonl"),
    "qa": ("qa", "dialogues.jsonl"),
}


def cmd_emit(args) -> int:
    cfg = _load_config(args)
    e = cfg["emit"]
    out = cfg.output_root / "emit"
    if not args.restart and _stage_is_done(
        out / "shards", "shards.json", cfg.hash()
    ):
        log.info("emit already complete for this config; nothing to do")
        return EXIT_OK
    tok = _tokenizer(cfg)
    fmt = load_chat_format(e["chat_format"]) if e["chat_format"] else CHATML

    streams = []
    counts: dict = {}
    rejected = 0
    for source in e["include"]:
        if source not in _EMIT_SOURCES:
            raise ConfigError(f"[emit] include has unknown source {source!r}")
        stage, fname = _EMIT_SOURCES[source]
        path = cfg.output_root / stage / fname
        if not path.exists():
            log.warning("emit: %s missing; skipping %s samples", path, source)
            continue
        samples = []
        for dlg in read_dialogues(path):
            try:
                samples.append(
                    tokenize_with_mask(dlg, tok, max_len=int(e["max_len"]), fmt=fmt)
                )
            except NoLearnableTokens as err:
                rejected += 1
                log.debug("emit: %s", err)
        counts[source] = len(samples)
        streams.append(samples)
    if not streams:
        raise ConfigError("emit found no input dialogues at all")

    mixed = mix_and_shuffle(streams, cfg.seed)
    manifest = write_shards(
        mixed,
        out / "shards",
        shard_size=int(e["shard_size"]),
        config_hash=cfg.hash(),
        seed=cfg.seed,
    )
    for variant in e["variants"]:
        emit_train_config(variant, out / f"train_config_{variant}.toml")
    atomic_write_json(
        out / "emit_manifest.json",
        {
            "config_hash": cfg.hash(),
            "samples": manifest["total"],
            "per_source": counts,
            "rejected_no_learnable": rejected,
            "chat_format": {"name": fmt.name, "version": fmt.version},
        },
    )
    log.info("emit: %d samples into %d shards", manifest["total"], len(manifest["shards"]))
    return EXIT_OK


def _scorer(cfg: RunConfig, items):
    stub = cfg["eval"]["stub"]
    if stub == "gold":
        return GoldFavoringScorer(items)
    if stub == "anti":
        return GoldFavoringScorer(items, invert=True)
    if stub == "random":
        return SeededRandomScorer(int(cfg["eval"]["stub_seed"]))
    if stub:
        raise ConfigError(f"[eval] stub must be gold/anti/random, not {stub!r}")
    return ModelClient(_client_config(cfg), require=("score",))


def cmd_eval(args) -> int:
    cfg = _load_config(args)
    ev = cfg["eval"]
    if not ev["benchmark"] or not ev["path"]:
        raise ConfigError("[eval] benchmark and path are required")
    expected = ev["expected_count"]
    items = load_benchmark(
        ev["benchmark"], ev["path"],
        expected_count=int(expected) if expected else None,
    )
    k = int(ev["k"])
    if k > 0:
        if not ev["dev_path"]:
            raise ConfigError(f"[eval] dev_path is required for k={k} shots")
        dev_pool = load_benchmark(ev["benchmark"], ev["dev_path"])
        shots = build_kshot(dev_pool, k, cfg.seed)
    else:
        shots = ShotSet(exemplars=[], k=0, seed=cfg.seed)

    econf = EvalConfig(
        k=k,
        normalization=ev["normalization"],
        seed=cfg.seed,
        continuation_style=ev["continuation_style"],
    )
    out = cfg.output_root / "eval"
    out.mkdir(parents=True, exist_ok=True)
    tag = f"{ev['benchmark']}-k{k}"
    report = evaluate(
        items,
        _scorer(cfg, items),
        shots,
        econf,
        benchmark=ev["benchmark"],
        model_id=ev["model_id"],
        config_hash=cfg.hash(),
        audit_path=out / f"audit-{tag}.jsonl",
    )
    atomic_write_json(out / f"report-{tag}.json", report.as_dict())
    log.info(
        "eval %s: %s correct of %s (%s%%)",
        tag, report.n_correct, report.n_items, report.pct(),
    )
    return EXIT_OK


def cmd_report(args) -> int:
    cfg = _load_config(args)
    eval_dir = cfg.output_root / "eval"
    reports: list[EvalReport] = []
    for path in sorted(eval_dir.glob("report-*.json")) if eval_dir.exists() else []:
        rec = json.loads(path.read_text(encoding="utf-8"))
        n_correct, n_items = int(rec["n_correct"]), int(rec["n_items"])
        from fractions import Fraction

        reports.append(
            EvalReport(
                benchmark=rec["benchmark"],
                n_items=n_items,
                n_correct=n_correct,
                accuracy=Fraction(n_correct, n_items),
                k=int(rec["k"]),
                config_hash=rec.get("config_hash", ""),
                model_id=rec.get("model_id", "local"),
            )
        )
    md, csv_text = render_report(reports)
    out = cfg.output_root / "report"
    out.mkdir(parents=True, exist_ok=True)
    atomic_write_text(out / "report.md", md)
    atomic_write_text(out / "report.csv", csv_text)
    log.info("report: wrote %s with %d local result(s)", out / "report.md", len(reports))
    return EXIT_OK


_NOTE_ALIASES = {"Patient": "user", "Bot": "assistant"}


def cmd_note(args) -> int:
    cfg = _load_config(args)
    dlg_path = args.dialogue or cfg["note"]["dialogue"]
    if not dlg_path:
        raise ConfigError("note needs --dialogue (or [note] dialogue in config)")
    p = Path(dlg_path)
    if p.suffix == ".jsonl":
        dlg = next(iter(read_dialogues(p)), None)
        if dlg is None:
            raise ConfigError(f"{p} holds no dialogues")
    else:
        dlg = parse_dialogue(p.read_text(encoding="utf-8"), _NOTE_ALIASES, p.stem)

    template = _template("clinical_note")
    prompt = template.render(render_dialogue_lines(dlg, _NOTE_ALIASES))

    stub_reply = args.stub_reply or cfg["note"]["stub_reply"]
    if stub_reply:
        teacher = StubTeacher([Path(stub_reply).read_text(encoding="utf-8")])
    else:
        teacher = _teacher(cfg)
    resp = teacher.chat_complete(
        ChatRequest(messages=[Turn(role="user", text=prompt)], temperature=0.3)
    )
    out = cfg.output_root / "note"
    out.mkdir(parents=True, exist_ok=True)
    note_path = out / f"{dlg.id}-note.txt"
    atomic_write_text(note_path, resp.text)
    log.info("note: wrote %s", note_path)
    return EXIT_OK


# -- entry -------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dialogsmith",
        description="dialogue synthesis + benchmark eval pipeline",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    commands = {
        "ingest": cmd_ingest,
        "transform": cmd_transform,
        "qa": cmd_qa,
        "emit": cmd_emit,
        "eval": cmd_eval,
        "report": cmd_report,
        "note": cmd_note,
    }
    for name, fn in commands.items():
        p = sub.add_parser(name)
        p.add_argument("--config", required=True, help="run config (TOML)")
        p.add_argument("--resume", action="store_true",
                       help="continue a partial run (this is also the default)")
        p.add_argument("--restart", action="store_true",
                       help="discard stage checkpoints and start over")
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--endpoint", default=None, help="override client endpoint")
        p.add_argument("--cache-dir", default=None, help="override response cache dir")
        if name == "note":
            p.add_argument("--dialogue", default=None, help="dialogue JSONL or transcript")
            p.add_argument("--stub-reply", default=None,
                           help="file whose text the stub teacher returns")
        p.set_defaults(fn=fn)
    return parser


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(
        stream=sys.stderr, level=logging.INFO, format="%(levelname)s %(name)s: %(message)s"
    )
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except (ConfigError, TemplateError, BenchmarkFormatError, CheckpointError,
            FileNotFoundError, ValueError) as e:
        stage = getattr(args, "command", "cli")
        log.error("%s: %s", stage, e)
        return EXIT_VALIDATION
    except (TransportError, AuthError, CapabilityError) as e:
        stage = getattr(args, "command", "cli")
        log.error("%s: %s (check endpoint/auth/network, then re-run — stages resume)", stage, e)
        return EXIT_TRANSPORT


if __name__ == "__main__":
    sys.exit(main())
