import numpy as np
import pytest

from infostatus.errors import InvariantError
from infostatus.model import ForwardTrace
from infostatus.probe import (EXCLUDED_TOKENS, aggregate_attention,
                              cls_attention_scores)
from infostatus.tokenizer import EncodedInput


def make_enc(words, max_tokens=8):
    n = len(words)
    ids = np.zeros(max_tokens, dtype=np.int32)
    segs = np.zeros(max_tokens, dtype=np.int32)
    mask = np.zeros(max_tokens, dtype=np.int32)
    mask[:n] = 1
    return EncodedInput(ids, segs, mask, n, tuple(words), "m0", "old")


def make_trace(attn_last):
    """attn_last: (heads, T, T) for a one-layer model."""
    attn = np.asarray(attn_last, dtype=np.float64)[None, :, :, :]
    return ForwardTrace(np.zeros(3), attn, np.zeros(4))


class TestClsAttentionScores:
    def test_uniform_attention_scores_equal_head_count(self):
        heads, n, t = 3, 4, 8
        row = np.zeros((heads, t, t))
        row[:, :, :n] = 1.0 / n
        enc = make_enc(["[CLS]", "a", "b", "c"], max_tokens=t)
        scores = cls_attention_scores(make_trace(row), enc)
        # each unmasked non-CLS token: heads * (1/n) * n = heads
        assert scores == {"a": pytest.approx(3.0), "b": pytest.approx(3.0),
                          "c": pytest.approx(3.0)}

    def test_single_head_full_attention(self):
        t = 8
        attn = np.zeros((1, t, t))
        attn[0, 0, 1] = 1.0   # [CLS] attends only token "a"; length 4
        enc = make_enc(["[CLS]", "a", "b", "c"], max_tokens=t)
        scores = cls_attention_scores(make_trace(attn), enc)
        assert scores["a"] == pytest.approx(4.0)
        assert scores["b"] == 0.0

    def test_padded_positions_score_zero(self):
        t = 8
        attn = np.full((2, t, t), 0.25)
        enc = make_enc(["[CLS]", "x"], max_tokens=t)
        scores = cls_attention_scores(make_trace(attn), enc)
        assert set(scores) == {"x"}   # nothing beyond the real length

    def test_subword_pieces_merge_by_source_word(self):
        t = 8
        attn = np.zeros((1, t, t))
        attn[0, 0, 1] = 0.3
        attn[0, 0, 2] = 0.2
        enc = make_enc(["[CLS]", "pitched", "pitched"], max_tokens=t)
        scores = cls_attention_scores(make_trace(attn), enc)
        assert scores["pitched"] == pytest.approx((0.3 + 0.2) * 3)

    def test_missing_attention_rejected(self):
        trace = ForwardTrace(np.zeros(3), None, np.zeros(4))
        with pytest.raises(InvariantError):
            cls_attention_scores(trace, make_enc(["[CLS]", "x"]))


class TestAggregateAttention:
    def test_single_instance_top_one(self):
        summary = aggregate_attention([("new", {"a": 2.0})], class_of=lambda c: c)
        assert summary.top["new"] == [("a", 2.0)]

    def test_excluded_tokens_never_ranked(self):
        scores = {"[CLS]": 9.0, "[SEP]": 8.0, ",": 7.0, ".": 6.0, "word": 1.0}
        summary = aggregate_attention([("old", scores)], class_of=lambda c: c)
        assert summary.top["old"] == [("word", 1.0)]
        assert summary.excluded == EXCLUDED_TOKENS

    def test_conservation_under_grouping(self):
        instances = [("old", {"a": 1.0, "b": 2.0}),
                     ("old", {"a": 0.5}),
                     ("new", {"a": 4.0})]
        summary = aggregate_attention(instances, class_of=lambda c: c)
        assert summary.class_scores["old"]["a"] == pytest.approx(1.5)
        assert summary.class_scores["old"]["b"] == pytest.approx(2.0)
        assert summary.class_scores["new"]["a"] == pytest.approx(4.0)
        total_in = sum(v for cls, s in instances for v in s.values())
        total_out = sum(v for bucket in summary.class_scores.values()
                        for v in bucket.values())
        assert total_in == pytest.approx(total_out)

    def test_ties_break_lexicographically(self):
        summary = aggregate_attention(
            [("old", {"zeta": 1.0, "alpha": 1.0, "mid": 1.0})],
            class_of=lambda c: c, k=2)
        assert summary.top["old"] == [("alpha", 1.0), ("mid", 1.0)]

    def test_top_k_sorted_descending(self):
        summary = aggregate_attention(
            [("old", {"a": 1.0, "b": 5.0, "c": 3.0})], class_of=lambda c: c, k=3)
        values = [v for _, v in summary.top["old"]]
        assert values == sorted(values, reverse=True)

    def test_deterministic(self):
        instances = [("old", {"a": 1.0, "b": 2.0}), ("new", {"c": 1.0})]
        a = aggregate_attention(instances, class_of=lambda c: c)
        b = aggregate_attention(instances, class_of=lambda c: c)
        assert a.top == b.top

    def test_empty_rejected(self):
        with pytest.raises(InvariantError):
            aggregate_attention([], class_of=lambda c: c)
