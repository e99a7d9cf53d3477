"""Document-level cross-validation, per-class metrics, and significance.

Accuracy is reported both pooled over all test predictions (primary) and
averaged per fold.  System comparison uses paired approximate randomization
on accuracy with add-one smoothing.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .context import ContextConfig
from .corpus import Corpus, LabelScheme, split_kfold, subcorpus
from .errors import InvariantError
from .model import (ModelConfig, PredRecord, TrainConfig, TrainedModel,
                    predict_corpus, train)


@dataclass(frozen=True)
class Metrics:
    labels: tuple[str, ...]
    confusion: np.ndarray          # rows = gold, cols = predicted
    support: np.ndarray
    precision: np.ndarray
    recall: np.ndarray
    f1: np.ndarray
    accuracy: float
    zero_support: np.ndarray       # class absent from golds and predictions

    @property
    def total(self) -> int:
        return int(self.confusion.sum())


def metrics_from_confusion(confusion: np.ndarray, labels: tuple[str, ...]) -> Metrics:
    confusion = np.asarray(confusion, dtype=np.int64)
    n = len(labels)
    if confusion.shape != (n, n):
        raise InvariantError(f"confusion must be {n}x{n}, got {confusion.shape}")
    support = confusion.sum(axis=1)
    predicted = confusion.sum(axis=0)
    tp = np.diag(confusion).astype(np.float64)
    with np.errstate(invalid="ignore", divide="ignore"):
        precision = np.where(predicted > 0, tp / np.maximum(predicted, 1), 0.0)
        recall = np.where(support > 0, tp / np.maximum(support, 1), 0.0)
    pr = precision + recall
    f1 = np.where(pr > 0, 2 * precision * recall / np.where(pr > 0, pr, 1.0), 0.0)
    total = confusion.sum()
    accuracy = float(tp.sum() / total) if total else 0.0
    zero_support = (support == 0) & (predicted == 0)
    return Metrics(tuple(labels), confusion, support, precision, recall, f1,
                   accuracy, zero_support)


def score(preds, golds, scheme: LabelScheme) -> Metrics:
    """Multi-class precision/recall/F1 per label plus overall accuracy."""
    if len(preds) != len(golds):
        raise InvariantError(f"{len(preds)} predictions vs {len(golds)} golds")
    n = len(scheme.labels)
    confusion = np.zeros((n, n), dtype=np.int64)
    for pred, gold in zip(preds, golds):
        confusion[scheme.index_of(gold), scheme.index_of(pred)] += 1
    return metrics_from_confusion(confusion, scheme.labels)


def format_report(metrics: Metrics, fold_accuracies=None) -> str:
    """Aligned text table: R/P/F per class (percent, one decimal) + accuracy."""
    width = max(len(lb) for lb in metrics.labels)
    lines = [f"{'class':<{width}}  {'R':>6}  {'P':>6}  {'F':>6}  {'support':>7}"]
    for i, label in enumerate(metrics.labels):
        note = "  (no support)" if metrics.zero_support[i] else ""
        lines.append(
            f"{label:<{width}}  {100 * metrics.recall[i]:6.1f}  "
            f"{100 * metrics.precision[i]:6.1f}  {100 * metrics.f1[i]:6.1f}  "
            f"{metrics.support[i]:7d}{note}"
        )
    correct = int(np.diag(metrics.confusion).sum())
    lines.append(f"accuracy (pooled)  {100 * metrics.accuracy:.1f}  ({correct}/{metrics.total})")
    if fold_accuracies:
        mean_acc = float(np.mean(fold_accuracies))
        folds = " ".join(f"{100 * a:.1f}" for a in fold_accuracies)
        lines.append(f"accuracy (mean over folds)  {100 * mean_acc:.1f}  [{folds}]")
    return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class FoldResult:
    fold: int
    test_doc_ids: tuple[str, ...]
    metrics: Metrics
    records: tuple[PredRecord, ...]


@dataclass(frozen=True)
class CVResult:
    folds: tuple[FoldResult, ...]
    pooled: Metrics
    models: tuple[TrainedModel, ...] | None = None

    @property
    def records(self) -> list[PredRecord]:
        return [r for fold in self.folds for r in fold.records]

    @property
    def fold_accuracies(self) -> list[float]:
        return [fold.metrics.accuracy for fold in self.folds]


def _default_fold_runner(train_corpus: Corpus, test_corpus: Corpus,
                         context_cfg: ContextConfig, model_cfg: ModelConfig,
                         train_cfg: TrainConfig):
    model = train(train_corpus, context_cfg, model_cfg, train_cfg)
    records = predict_corpus(model, list(test_corpus.documents))
    return records, model


def _run_fold(args):
    (fold_idx, corpus, train_ids, test_ids, context_cfg, model_cfg,
     train_cfg, keep_model) = args
    from dataclasses import replace
    fold_train_cfg = replace(train_cfg, seed=train_cfg.seed + fold_idx)
    fold_model_cfg = replace(model_cfg, seed=model_cfg.seed + fold_idx)
    records, model = _default_fold_runner(
        subcorpus(corpus, train_ids), subcorpus(corpus, test_ids),
        context_cfg, fold_model_cfg, fold_train_cfg,
    )
    return fold_idx, records, (model if keep_model else None)


def cross_validate(corpus: Corpus, context_cfg: ContextConfig,
                   model_cfg: ModelConfig, train_cfg: TrainConfig,
                   k: int, seed: int, *, jobs: int = 1,
                   keep_models: bool = False, fold_runner=None) -> CVResult:
    """Document-level k-fold CV: train on k-1 folds, predict the held-out
    fold, pool all test predictions.  Hyperparameters are identical across
    folds (per-fold seeds are derived deterministically from fold index).

    fold_runner(train_corpus, test_corpus, fold_idx) -> records may replace
    the training pipeline, e.g. with a stub for harness tests.
    """
    splits = split_kfold(corpus, k, seed)

    if fold_runner is not None:
        outcomes = []
        for fold_idx, (train_ids, test_ids) in enumerate(splits):
            records = fold_runner(subcorpus(corpus, train_ids),
                                  subcorpus(corpus, test_ids), fold_idx)
            outcomes.append((fold_idx, records, None))
    else:
        tasks = [
            (i, corpus, train_ids, test_ids, context_cfg, model_cfg,
             train_cfg, keep_models)
            for i, (train_ids, test_ids) in enumerate(splits)
        ]
        if jobs > 1:
            with ProcessPoolExecutor(max_workers=jobs) as pool:
                outcomes = list(pool.map(_run_fold, tasks))
        else:
            outcomes = [_run_fold(t) for t in tasks]
        outcomes.sort(key=lambda o: o[0])

    folds = []
    models = []
    for fold_idx, records, model in outcomes:
        fold_metrics = score([r.predicted for r in records],
                             [r.gold for r in records], corpus.scheme)
        folds.append(FoldResult(fold_idx, splits[fold_idx][1], fold_metrics,
                                tuple(records)))
        if model is not None:
            models.append(model)

    all_records = [r for fold in folds for r in fold.records]
    if len(all_records) != corpus.total_mentions():
        raise InvariantError(
            f"pooled predictions ({len(all_records)}) do not cover the corpus "
            f"({corpus.total_mentions()} mentions)"
        )
    pooled = score([r.predicted for r in all_records],
                   [r.gold for r in all_records], corpus.scheme)
    return CVResult(tuple(folds), pooled, tuple(models) if keep_models else None)


def randomization_test(preds_a, preds_b, golds, rounds: int = 10000,
                       seed: int = 0) -> float:
    """Paired approximate randomization on accuracy.

    Each round swaps every aligned prediction pair with probability 1/2;
    p = (1 + #{rounds with |delta| >= observed}) / (rounds + 1).  Deltas are
    compared as integer correct-counts, so the test is exact and symmetric
    in the two systems.
    """
    if not (len(preds_a) == len(preds_b) == len(golds)):
        raise InvariantError("prediction and gold lists must be aligned")
    if rounds < 1:
        raise InvariantError(f"rounds must be >= 1, got {rounds}")
    correct_a = np.array([p == g for p, g in zip(preds_a, golds)], dtype=np.int64)
    correct_b = np.array([p == g for p, g in zip(preds_b, golds)], dtype=np.int64)
    observed = abs(int(correct_a.sum()) - int(correct_b.sum()))
    # swap flips the sign of each pair's contribution; counts stay small
    # enough that float32 matmuls are exact integer arithmetic
    diff = (correct_a - correct_b).astype(np.float32)
    rng = np.random.default_rng(seed)
    hits = 0
    chunk = max(1, min(rounds, 5_000_000 // max(1, len(diff))))
    done = 0
    while done < rounds:
        r = min(chunk, rounds - done)
        signs = (rng.integers(0, 2, size=(r, len(diff)), dtype=np.int8) * 2 - 1)
        deltas = np.abs(signs.astype(np.float32) @ diff)
        hits += int((deltas >= observed).sum())
        done += r
    return (1 + hits) / (rounds + 1)
