"""Command-line entry point for the information-status pipeline.

Subcommands: gen-synthetic, build-vocab, train, cross-validate, probe,
ablate.  Every run writes a manifest (the fully resolved configuration and
seeds) next to its outputs; rerunning a command with ``--config`` pointing
at that manifest reproduces the reports byte for byte.

Value precedence: explicit flag > IS_SEED environment variable (seed only)
> config file > --profile > built-in default.  Exit codes: 0 success,
2 usage/configuration error, 3 data error, 4 runtime error.
"""

from __future__ import annotations

import argparse
import configparser
import dataclasses
import json
import os
import sys
from pathlib import Path

from . import evaluation, model as model_mod, probe as probe_mod
from .context import ContextConfig
from .corpus import corpus_stats, format_stats, load_corpus, save_corpus, split_kfold, subcorpus
from .errors import ConfigError, InvariantError, SchemaError
from .model import PROFILES, ModelConfig, TrainConfig, load_checkpoint, save_checkpoint
from .synth import SynthConfig, gen_synthetic
from .tokenizer import build_vocab, save_vocab

_ABLATIONS = {
    "full": {},
    "wo-mention": {"include_mention": False},
    "wo-local": {"include_local_context": False},
    "wo-overlap": {"include_overlap": False},
    "wo-context": {"include_local_context": False, "include_overlap": False},
}


def _add_context_flags(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--no-mention", action="store_true",
                     help="drop the target mention from the pseudo sentence")
    sub.add_argument("--no-local", action="store_true",
                     help="drop the local sentence from the pseudo sentence")
    sub.add_argument("--no-overlap", action="store_true",
                     help="drop the previous-overlap markers")
    sub.add_argument("--prev-sents", type=int, default=None, metavar="K",
                     help="include the K previous sentences in the context")
    sub.add_argument("--all-prev", action="store_true",
                     help="include all previous context via sliding windows")
    sub.add_argument("--max-tokens", type=int, default=None,
                     help="pseudo-sentence token budget")
    sub.add_argument("--stride", type=int, default=None,
                     help="sliding-window stride for --all-prev")


def _add_train_flags(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--profile", choices=sorted(PROFILES), default=None,
                     help="named hyperparameter bundle")
    sub.add_argument("--epochs", type=int, default=None)
    sub.add_argument("--lr", type=float, default=None)
    sub.add_argument("--batch-size", type=int, default=None)
    sub.add_argument("--vocab-size", type=int, default=None,
                     help="subword vocabulary budget")
    sub.add_argument("--layers", type=int, default=None)
    sub.add_argument("--heads", type=int, default=None)
    sub.add_argument("--hidden", type=int, default=None)
    sub.add_argument("--ff", type=int, default=None)
    sub.add_argument("--dropout", type=float, default=None)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="infostatus",
        description="Discourse context-aware information status classification.",
    )
    commands = parser.add_subparsers(dest="command", required=True)

    gen = commands.add_parser("gen-synthetic", help="generate a rule-labeled corpus")
    gen.add_argument("--config", default=None)
    gen.add_argument("--docs", type=int, default=None)
    gen.add_argument("--sents", type=int, default=None, help="sentences per document")
    gen.add_argument("--seed", type=int, default=None)
    gen.add_argument("--out", required=True, help="corpus file to write")

    vocab = commands.add_parser("build-vocab", help="learn a subword vocabulary")
    vocab.add_argument("--config", default=None)
    vocab.add_argument("--corpus", default=None)
    vocab.add_argument("--size", type=int, default=None)
    vocab.add_argument("--out", required=True, help="vocabulary file to write")

    tr = commands.add_parser("train", help="train one model on a whole corpus")
    tr.add_argument("--config", default=None)
    tr.add_argument("--corpus", default=None)
    tr.add_argument("--seed", type=int, default=None)
    tr.add_argument("--checkpoint", required=True, help="checkpoint file to write")
    _add_context_flags(tr)
    _add_train_flags(tr)

    cv = commands.add_parser("cross-validate", help="document-level k-fold CV")
    cv.add_argument("--config", default=None)
    cv.add_argument("--corpus", default=None)
    cv.add_argument("--folds", type=int, default=None)
    cv.add_argument("--seed", type=int, default=None)
    cv.add_argument("--jobs", type=int, default=None,
                    help="parallel fold workers (default: available cores)")
    cv.add_argument("--save-checkpoints", action="store_true",
                    help="write one checkpoint per fold")
    cv.add_argument("--report-out", required=True, help="output directory")
    _add_context_flags(cv)
    _add_train_flags(cv)

    pr = commands.add_parser("probe", help="rank most-attended tokens per class")
    pr.add_argument("--config", default=None)
    pr.add_argument("--checkpoint", default=None, help="trained model checkpoint")
    pr.add_argument("--corpus", default=None)
    pr.add_argument("--folds", type=int, default=None)
    pr.add_argument("--fold", type=int, default=None,
                    help="fold index whose test documents are probed")
    pr.add_argument("--seed", type=int, default=None)
    pr.add_argument("--top-k", type=int, default=None)
    pr.add_argument("--by-predicted", action="store_true",
                    help="group by predicted class instead of gold")
    pr.add_argument("--out", required=True, help="output directory")

    ab = commands.add_parser("ablate", help="CV sweep over the pseudo-sentence parts")
    ab.add_argument("--config", default=None)
    ab.add_argument("--corpus", default=None)
    ab.add_argument("--folds", type=int, default=None)
    ab.add_argument("--seed", type=int, default=None)
    ab.add_argument("--jobs", type=int, default=None)
    ab.add_argument("--report-out", required=True, help="output directory")
    _add_context_flags(ab)
    _add_train_flags(ab)

    return parser


class _Settings:
    """Layered lookup: flag > IS_SEED (seed only) > config file > profile > default."""

    def __init__(self, args: argparse.Namespace):
        self.args = args
        self.cfg = configparser.ConfigParser()
        if getattr(args, "config", None):
            path = Path(args.config)
            if not path.exists():
                raise OSError(f"config file not found: {path}")
            self.cfg.read(path)
        self.profile = None
        name = self._raw("run", "profile", getattr(args, "profile", None))
        if name:
            if name not in PROFILES:
                raise ConfigError(f"unknown profile {name!r}")
            self.profile = name

    def _raw(self, section: str, key: str, flag_value):
        if flag_value is not None:
            return flag_value
        if self.cfg.has_option(section, key):
            return self.cfg.get(section, key)
        return None

    def get(self, section: str, key: str, default, cast, flag=None):
        raw = self._raw(section, key, flag)
        if raw is None:
            return default
        if cast is bool and isinstance(raw, str):
            return raw.strip().lower() in ("1", "true", "yes", "on")
        return cast(raw)

    def seed(self, default: int = 0) -> int:
        flag = getattr(self.args, "seed", None)
        if flag is not None:
            return flag
        env = os.environ.get("IS_SEED")
        if env is not None:
            try:
                return int(env)
            except ValueError:
                raise ConfigError(f"IS_SEED must be an integer, got {env!r}") from None
        return self.get("run", "seed", default, int)

    def context_config(self) -> ContextConfig:
        args = self.args
        include_mention = self.get("context", "include_mention", True, bool)
        include_local = self.get("context", "include_local_context", True, bool)
        include_overlap = self.get("context", "include_overlap", True, bool)
        if getattr(args, "no_mention", False):
            include_mention = False
        if getattr(args, "no_local", False):
            include_local = False
        if getattr(args, "no_overlap", False):
            include_overlap = False
        all_prev = self.get("context", "all_previous_context", False, bool)
        if getattr(args, "all_prev", False):
            all_prev = True
        default_max = PROFILES[self.profile].max_tokens if self.profile else 128
        ctx = ContextConfig(
            include_mention=include_mention,
            include_local_context=include_local,
            include_overlap=include_overlap,
            extra_prev_sentences=self.get("context", "extra_prev_sentences", 0,
                                          int, getattr(args, "prev_sents", None)),
            max_tokens=self.get("context", "max_tokens", default_max, int,
                                getattr(args, "max_tokens", None)),
            sliding_window_stride=self.get("context", "sliding_window_stride", 100,
                                           int, getattr(args, "stride", None)),
            all_previous_context=all_prev,
        )
        ctx.validate()
        return ctx

    def model_config(self, seed: int) -> ModelConfig:
        args = self.args
        cfg = ModelConfig(
            layers=self.get("model", "layers", 2, int, getattr(args, "layers", None)),
            heads=self.get("model", "heads", 4, int, getattr(args, "heads", None)),
            hidden=self.get("model", "hidden", 128, int, getattr(args, "hidden", None)),
            ff=self.get("model", "ff", 512, int, getattr(args, "ff", None)),
            max_positions=1, vocab_size=1, n_classes=1,  # resolved at train time
            dropout=self.get("model", "dropout", 0.1, float,
                             getattr(args, "dropout", None)),
            seed=self.get("model", "seed", seed, int),
        )
        return cfg

    def train_config(self, seed: int) -> TrainConfig:
        args = self.args
        prof = PROFILES[self.profile] if self.profile else PROFILES["desk"]
        cfg = TrainConfig(
            epochs=self.get("train", "epochs", prof.epochs, int,
                            getattr(args, "epochs", None)),
            lr=self.get("train", "lr", prof.lr, float, getattr(args, "lr", None)),
            batch_size=self.get("train", "batch_size", prof.batch_size, int,
                                getattr(args, "batch_size", None)),
            seed=self.get("train", "seed", seed, int),
            warmup_frac=self.get("train", "warmup_frac", 0.1, float),
            vocab_target=self.get("train", "vocab_target", 2000, int,
                                  getattr(args, "vocab_size", None)),
        )
        cfg.validate()
        return cfg


def _manifest(command: str, run: dict, sections: dict[str, dict]) -> configparser.ConfigParser:
    out = configparser.ConfigParser()
    out["run"] = {"command": command, **{k: str(v) for k, v in run.items()}}
    for name, values in sections.items():
        out[name] = {k: str(v) for k, v in values.items()}
    return out


def _write_manifest(manifest: configparser.ConfigParser, path: Path) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as fh:
        manifest.write(fh)


def _context_section(ctx: ContextConfig) -> dict:
    return dataclasses.asdict(ctx)


def _model_section(cfg: ModelConfig) -> dict:
    values = dataclasses.asdict(cfg)
    # placeholders resolved per training fold; keep them out of the manifest
    for key in ("max_positions", "vocab_size", "n_classes"):
        values.pop(key)
    return values


def _train_section(cfg: TrainConfig) -> dict:
    return dataclasses.asdict(cfg)


def _write_cv_outputs(outdir: Path, result: evaluation.CVResult) -> None:
    outdir.mkdir(parents=True, exist_ok=True)
    with open(outdir / "report.txt", "w", encoding="utf-8") as fh:
        fh.write(evaluation.format_report(result.pooled, result.fold_accuracies))
    with open(outdir / "predictions.jsonl", "w", encoding="utf-8") as fh:
        for fold in result.folds:
            for r in fold.records:
                fh.write(json.dumps({
                    "doc_id": r.doc_id, "mention_id": r.mention_id,
                    "gold": r.gold, "predicted": r.predicted, "fold": fold.fold,
                }, ensure_ascii=False) + "\n")


def _cmd_gen_synthetic(args) -> int:
    settings = _Settings(args)
    docs = settings.get("run", "docs", 50, int, args.docs)
    sents = settings.get("run", "sents", 30, int, args.sents)
    seed = settings.seed(0)
    corpus = gen_synthetic(SynthConfig(docs=docs, sentences_per_doc=sents), seed)
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    save_corpus(corpus, out)
    _write_manifest(
        _manifest("gen-synthetic", {"docs": docs, "sents": sents, "seed": seed}, {}),
        out.with_name(out.name + ".manifest"),
    )
    print(format_stats(corpus_stats(corpus)))
    return 0


def _cmd_build_vocab(args) -> int:
    settings = _Settings(args)
    corpus_path = settings.get("run", "corpus", None, str, args.corpus)
    if corpus_path is None:
        raise ConfigError("--corpus is required")
    size = settings.get("run", "size", 2000, int, args.size)
    corpus = load_corpus(corpus_path)
    vocab = build_vocab(corpus, size)
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    save_vocab(vocab, out)
    _write_manifest(
        _manifest("build-vocab", {"corpus": corpus_path, "size": size}, {}),
        out.with_name(out.name + ".manifest"),
    )
    print(f"vocabulary of {len(vocab)} tokens written to {out}")
    return 0


def _resolve_cv_settings(args):
    settings = _Settings(args)
    corpus_path = settings.get("run", "corpus", None, str, args.corpus)
    if corpus_path is None:
        raise ConfigError("--corpus is required")
    seed = settings.seed(0)
    ctx = settings.context_config()
    mcfg = settings.model_config(seed)
    tcfg = settings.train_config(seed)
    return settings, corpus_path, seed, ctx, mcfg, tcfg


def _cmd_train(args) -> int:
    settings, corpus_path, seed, ctx, mcfg, tcfg = _resolve_cv_settings(args)
    corpus = load_corpus(corpus_path)
    trained = model_mod.train(corpus, ctx, mcfg, tcfg)
    ckpt = Path(args.checkpoint)
    ckpt.parent.mkdir(parents=True, exist_ok=True)
    save_checkpoint(trained, ckpt)
    manifest = _manifest(
        "train",
        {"corpus": corpus_path, "seed": seed,
         **({"profile": settings.profile} if settings.profile else {})},
        {"context": _context_section(ctx), "model": _model_section(mcfg),
         "train": _train_section(tcfg)},
    )
    _write_manifest(manifest, ckpt.with_name(ckpt.name + ".manifest"))
    for epoch, loss in enumerate(trained.log, start=1):
        print(f"epoch {epoch}: loss {loss:.4f}")
    print(f"checkpoint written to {ckpt}")
    return 0


def _cmd_cross_validate(args) -> int:
    settings, corpus_path, seed, ctx, mcfg, tcfg = _resolve_cv_settings(args)
    folds = settings.get("run", "folds", 10, int, args.folds)
    jobs = args.jobs if args.jobs is not None else (os.cpu_count() or 1)
    corpus = load_corpus(corpus_path)
    result = evaluation.cross_validate(
        corpus, ctx, mcfg, tcfg, folds, seed,
        jobs=jobs, keep_models=args.save_checkpoints,
    )
    outdir = Path(args.report_out)
    _write_cv_outputs(outdir, result)
    if args.save_checkpoints and result.models:
        for i, trained in enumerate(result.models):
            save_checkpoint(trained, outdir / f"fold-{i}.ckpt")
    manifest = _manifest(
        "cross-validate",
        {"corpus": corpus_path, "folds": folds, "seed": seed,
         **({"profile": settings.profile} if settings.profile else {})},
        {"context": _context_section(ctx), "model": _model_section(mcfg),
         "train": _train_section(tcfg)},
    )
    _write_manifest(manifest, outdir / "manifest.ini")
    print((outdir / "report.txt").read_text(encoding="utf-8"), end="")
    return 0


def _cmd_probe(args) -> int:
    settings = _Settings(args)
    corpus_path = settings.get("run", "corpus", None, str, args.corpus)
    ckpt_path = settings.get("run", "checkpoint", None, str, args.checkpoint)
    if corpus_path is None or ckpt_path is None:
        raise ConfigError("--corpus and --checkpoint are required")
    folds = settings.get("run", "folds", 10, int, args.folds)
    fold = settings.get("run", "fold", 0, int, args.fold)
    seed = settings.seed(0)
    top_k = settings.get("run", "top_k", 10, int, args.top_k)
    corpus = load_corpus(corpus_path)
    trained = load_checkpoint(ckpt_path)
    splits = split_kfold(corpus, folds, seed)
    if not 0 <= fold < folds:
        raise ConfigError(f"fold must lie in [0, {folds}), got {fold}")
    test_docs = list(subcorpus(corpus, splits[fold][1]).documents)
    summary = probe_mod.probe_model(trained, test_docs, k=top_k,
                                    by_predicted=args.by_predicted)
    outdir = Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)
    table = probe_mod.format_attention_table(summary, labels=trained.scheme.labels)
    (outdir / "attention.txt").write_text(table, encoding="utf-8")
    with open(outdir / "attention.json", "w", encoding="utf-8") as fh:
        json.dump({cls: [[t, s] for t, s in ranked]
                   for cls, ranked in summary.top.items()}, fh, ensure_ascii=False,
                  indent=2, sort_keys=True)
        fh.write("\n")
    manifest = _manifest(
        "probe",
        {"corpus": corpus_path, "checkpoint": ckpt_path, "folds": folds,
         "fold": fold, "seed": seed, "top_k": top_k,
         "by_predicted": args.by_predicted},
        {},
    )
    _write_manifest(manifest, outdir / "manifest.ini")
    print(table, end="")
    return 0


def _cmd_ablate(args) -> int:
    settings, corpus_path, seed, ctx, mcfg, tcfg = _resolve_cv_settings(args)
    folds = settings.get("run", "folds", 10, int, args.folds)
    jobs = args.jobs if args.jobs is not None else (os.cpu_count() or 1)
    corpus = load_corpus(corpus_path)
    outdir = Path(args.report_out)
    for name, overrides in _ABLATIONS.items():
        variant = dataclasses.replace(ctx, **overrides)
        result = evaluation.cross_validate(corpus, variant, mcfg, tcfg, folds,
                                           seed, jobs=jobs)
        _write_cv_outputs(outdir / name, result)
        print(f"{name}: pooled accuracy {100 * result.pooled.accuracy:.1f}")
    manifest = _manifest(
        "ablate",
        {"corpus": corpus_path, "folds": folds, "seed": seed,
         **({"profile": settings.profile} if settings.profile else {})},
        {"context": _context_section(ctx), "model": _model_section(mcfg),
         "train": _train_section(tcfg)},
    )
    _write_manifest(manifest, outdir / "manifest.ini")
    return 0


_COMMANDS = {
    "gen-synthetic": _cmd_gen_synthetic,
    "build-vocab": _cmd_build_vocab,
    "train": _cmd_train,
    "cross-validate": _cmd_cross_validate,
    "probe": _cmd_probe,
    "ablate": _cmd_ablate,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except ConfigError as exc:
        print(f"infostatus: error: ConfigError: {exc}", file=sys.stderr)
        return 2
    except (SchemaError, InvariantError, OSError) as exc:
        print(f"infostatus: error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 3
    except Exception as exc:  # noqa: BLE001 - boundary of the process
        print(f"infostatus: error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 4


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    sys.exit(main())
