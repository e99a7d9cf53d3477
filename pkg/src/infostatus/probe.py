"""Rank the tokens most attended from [CLS], per information-status class.

For each test instance the last layer's [CLS] attention row is summed over
all heads, each weight multiplied by the real (unpadded) sequence length,
and subword pieces merged back to their source word.  Scores aggregate per
gold class (or predicted class on request), with framing and punctuation
tokens excluded from the rankings.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .context import CLS, SEP, build_instances
from .corpus import Document
from .errors import InvariantError
from .model import ForwardTrace, TrainedModel, forward
from .tokenizer import EncodedInput, encode

EXCLUDED_TOKENS = frozenset({CLS, SEP, ",", "."})


def cls_attention_scores(trace: ForwardTrace, enc: EncodedInput) -> dict[str, float]:
    """Length-normalized [CLS]-to-token attention for a single instance.

    Sums the last layer over all heads, multiplies by the real sequence
    length (so uniform attention scores are length-invariant), and sums
    subword pieces into their source words.  Padded positions contribute
    nothing; the [CLS] position itself is not scored.
    """
    if trace.attentions is None:
        raise InvariantError("forward trace was produced without attention retention")
    last = trace.attentions[-1]            # (heads, len, len)
    cls_row = last[:, 0, :].sum(axis=0)    # summed over heads
    length = enc.length
    scores: dict[str, float] = {}
    for pos in range(1, length):
        word = enc.words[pos]
        scores[word] = scores.get(word, 0.0) + float(cls_row[pos]) * length
    return scores


@dataclass(frozen=True)
class AttentionSummary:
    class_scores: dict[str, dict[str, float]]
    top: dict[str, list[tuple[str, float]]]
    excluded: frozenset[str]


def aggregate_attention(instances, class_of, k: int = 10) -> AttentionSummary:
    """Sum per-instance token scores within each class and rank the top k.

    instances is a list of (instance, scores) pairs where scores maps token
    string to attention score and class_of(instance) names the class.
    Excluded tokens never enter a ranking; ties break lexicographically.
    """
    instances = list(instances)
    if not instances:
        raise InvariantError("no instances to aggregate")
    class_scores: dict[str, dict[str, float]] = {}
    for instance, scores in instances:
        bucket = class_scores.setdefault(class_of(instance), {})
        for token, value in scores.items():
            bucket[token] = bucket.get(token, 0.0) + value
    top: dict[str, list[tuple[str, float]]] = {}
    for cls_name, bucket in class_scores.items():
        ranked = sorted(
            ((tok, val) for tok, val in bucket.items() if tok not in EXCLUDED_TOKENS),
            key=lambda item: (-item[1], item[0]),
        )
        top[cls_name] = ranked[:k]
    return AttentionSummary(class_scores, top, EXCLUDED_TOKENS)


def probe_model(model: TrainedModel, docs: list[Document], k: int = 10,
                by_predicted: bool = False) -> AttentionSummary:
    """Run the trained model over the documents' mentions and aggregate
    [CLS] attention per class (gold by default, predicted on request)."""
    pairs = []
    for doc in docs:
        for ps in build_instances([doc], model.context):
            enc = encode(ps, model.vocab, model.context.max_tokens)
            trace = forward(model.params, model.config, enc, collect_attention=True)
            scores = cls_attention_scores(trace, enc)
            if by_predicted:
                cls_name = model.scheme.labels[int(np.argmax(trace.logits))]
            else:
                cls_name = ps.gold_label
            pairs.append((cls_name, scores))
    return aggregate_attention(pairs, class_of=lambda name: name, k=k)


def format_attention_table(summary: AttentionSummary, labels=None) -> str:
    """One row per class listing its most attended tokens."""
    names = list(labels) if labels is not None else sorted(summary.top)
    width = max((len(n) for n in names), default=8)
    lines = [f"{'IS class':<{width}}  most attended tokens"]
    for name in names:
        ranked = summary.top.get(name, [])
        toks = ", ".join(tok for tok, _ in ranked)
        lines.append(f"{name:<{width}}  {toks}")
    return "\n".join(lines) + "\n"
