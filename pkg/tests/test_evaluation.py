import numpy as np
import pytest
from hypothesis import given, strategies as st

from infostatus.corpus import ISNOTES_SCHEME, LabelScheme
from infostatus.errors import InvariantError
from infostatus.evaluation import (cross_validate, format_report,
                                   metrics_from_confusion, randomization_test,
                                   score)
from infostatus.model import PredRecord
from infostatus.synth import SynthConfig, gen_synthetic

BN = LabelScheme("bn", ("b", "n"))


class TestScore:
    def test_perfect_predictions(self):
        golds = ["old", "new", "m/bridging", "old"]
        m = score(golds, golds, ISNOTES_SCHEME)
        assert m.accuracy == 1.0
        for i, label in enumerate(ISNOTES_SCHEME.labels):
            if m.support[i] > 0:
                assert m.f1[i] == 1.0

    def test_hand_counted_confusion(self):
        golds = ["b", "b", "n", "n", "n"]
        preds = ["b", "n", "n", "n", "b"]
        m = score(preds, golds, BN)
        b = BN.index_of("b")
        assert m.precision[b] == 0.5
        assert m.recall[b] == 0.5
        assert m.f1[b] == 0.5
        assert m.accuracy == 0.6

    def test_zero_support_class_flagged(self):
        golds = ["old", "old"]
        preds = ["old", "old"]
        m = score(preds, golds, ISNOTES_SCHEME)
        i = ISNOTES_SCHEME.index_of("m/function")
        assert m.zero_support[i]
        assert m.precision[i] == m.recall[i] == m.f1[i] == 0.0

    def test_length_mismatch(self):
        with pytest.raises(InvariantError):
            score(["b"], ["b", "n"], BN)

    def test_unknown_label(self):
        with pytest.raises(InvariantError):
            score(["x"], ["b"], BN)

    def test_confusion_row_sums_are_supports(self):
        rng = np.random.default_rng(0)
        labels = [ISNOTES_SCHEME.labels[i] for i in rng.integers(0, 8, size=200)]
        preds = [ISNOTES_SCHEME.labels[i] for i in rng.integers(0, 8, size=200)]
        m = score(preds, labels, ISNOTES_SCHEME)
        assert np.array_equal(m.confusion.sum(axis=1), m.support)
        assert m.accuracy == np.trace(m.confusion) / 200

    @given(st.integers(0, 10_000))
    def test_dual_path_metrics(self, seed):
        rng = np.random.default_rng(seed)
        n = int(rng.integers(1, 60))
        golds = [ISNOTES_SCHEME.labels[i] for i in rng.integers(0, 8, size=n)]
        preds = [ISNOTES_SCHEME.labels[i] for i in rng.integers(0, 8, size=n)]
        from_pairs = score(preds, golds, ISNOTES_SCHEME)
        from_matrix = metrics_from_confusion(from_pairs.confusion,
                                             ISNOTES_SCHEME.labels)
        assert from_pairs.accuracy == from_matrix.accuracy
        assert np.array_equal(from_pairs.precision, from_matrix.precision)
        assert np.array_equal(from_pairs.recall, from_matrix.recall)
        assert np.array_equal(from_pairs.f1, from_matrix.f1)


@pytest.fixture(scope="module")
def corpus():
    return gen_synthetic(SynthConfig(docs=10, sentences_per_doc=8), seed=1)


class TestCrossValidateHarness:
    """Harness checks with a stub fold runner; real training runs elsewhere."""

    def test_every_document_tested_exactly_once(self, corpus):
        tested: list[str] = []

        def stub(train_c, test_c, fold):
            tested.extend(d.doc_id for d in test_c.documents)
            return [PredRecord(d.doc_id, m.mention_id, m.label, "old")
                    for d in test_c.documents
                    for s in d.sentences for m in s.mentions]

        result = cross_validate(corpus, None, None, None, 5, seed=3,
                                fold_runner=stub)
        assert sorted(tested) == sorted(d.doc_id for d in corpus.documents)
        assert result.pooled.total == corpus.total_mentions()

    def test_constant_stub_accuracy_is_majority_share(self, corpus):
        def stub(train_c, test_c, fold):
            return [PredRecord(d.doc_id, m.mention_id, m.label, "old")
                    for d in test_c.documents
                    for s in d.sentences for m in s.mentions]

        result = cross_validate(corpus, None, None, None, 5, seed=3,
                                fold_runner=stub)
        old_share = sum(
            1 for d in corpus.documents for s in d.sentences
            for m in s.mentions if m.label == "old"
        ) / corpus.total_mentions()
        assert result.pooled.accuracy == pytest.approx(old_share)

    def test_pooled_accuracy_matches_record_recount(self, corpus):
        rng = np.random.default_rng(7)

        def stub(train_c, test_c, fold):
            return [
                PredRecord(d.doc_id, m.mention_id, m.label,
                           corpus.scheme.labels[rng.integers(0, 8)])
                for d in test_c.documents
                for s in d.sentences for m in s.mentions
            ]

        result = cross_validate(corpus, None, None, None, 5, seed=3,
                                fold_runner=stub)
        records = result.records
        recount = sum(r.gold == r.predicted for r in records) / len(records)
        assert result.pooled.accuracy == pytest.approx(recount)
        assert len(records) == corpus.total_mentions()


class TestRandomizationTest:
    def test_identical_predictions_give_p_one(self):
        golds = ["b", "n"] * 10
        preds = ["b", "b"] * 10
        assert randomization_test(preds, preds, golds, rounds=500, seed=0) == 1.0

    def test_all_correct_vs_all_wrong(self):
        golds = ["b"] * 20
        a = ["b"] * 20
        b = ["n"] * 20
        p = randomization_test(a, b, golds, rounds=10_000, seed=0)
        assert p <= 0.01

    def test_symmetric(self):
        rng = np.random.default_rng(1)
        golds = [BN.labels[i] for i in rng.integers(0, 2, size=50)]
        a = [BN.labels[i] for i in rng.integers(0, 2, size=50)]
        b = [BN.labels[i] for i in rng.integers(0, 2, size=50)]
        pa = randomization_test(a, b, golds, rounds=2000, seed=5)
        pb = randomization_test(b, a, golds, rounds=2000, seed=5)
        assert pa == pb

    def test_p_in_unit_interval_and_deterministic(self):
        rng = np.random.default_rng(2)
        golds = [BN.labels[i] for i in rng.integers(0, 2, size=30)]
        a = [BN.labels[i] for i in rng.integers(0, 2, size=30)]
        b = [BN.labels[i] for i in rng.integers(0, 2, size=30)]
        p1 = randomization_test(a, b, golds, rounds=3000, seed=9)
        p2 = randomization_test(a, b, golds, rounds=3000, seed=9)
        assert 0.0 < p1 <= 1.0
        assert p1 == p2

    def test_stabilizes_at_corpus_scale(self):
        # two seeds on a 10,980-item comparison differ by < 0.01
        rng = np.random.default_rng(3)
        n = 10_980
        golds = ["b"] * n
        correct_a = rng.random(n) < 0.837
        correct_b = rng.random(n) < 0.789
        a = ["b" if c else "n" for c in correct_a]
        b = ["b" if c else "n" for c in correct_b]
        p1 = randomization_test(a, b, golds, rounds=10_000, seed=11)
        p2 = randomization_test(a, b, golds, rounds=10_000, seed=12)
        assert abs(p1 - p2) < 0.01

    def test_length_mismatch(self):
        with pytest.raises(InvariantError):
            randomization_test(["b"], ["b", "n"], ["b", "n"])


def test_format_report_shape():
    golds = ["b", "b", "n", "n", "n"]
    preds = ["b", "n", "n", "n", "b"]
    text = format_report(score(preds, golds, BN), fold_accuracies=[0.6, 0.6])
    lines = text.splitlines()
    assert lines[0].split() == ["class", "R", "P", "F", "support"]
    assert any(line.startswith("accuracy (pooled)  60.0") for line in lines)
    assert any("mean over folds" in line for line in lines)
