import numpy as np
import pytest
from hypothesis import given, strategies as st

from infostatus.context import (CLS, OVERLAP_TOKENS, SEP, ContextConfig,
                                build_pseudo_sentence)
from infostatus.corpus import Corpus, Document, ISNOTES_SCHEME, Sentence
from infostatus.errors import BudgetError, ConfigError
from infostatus.synth import SynthConfig, gen_synthetic
from infostatus.tokenizer import (CORE_SPECIALS, PAD_ID, UNK, Vocab,
                                  build_vocab, decode, encode, load_vocab,
                                  save_vocab, tokenize)
from infostatus.context import PseudoSentence


def corpus_of_words(*words):
    sent = Sentence(0, tuple(words), ())
    return Corpus(ISNOTES_SCHEME, (Document("d0", (sent,)),))


class TestBuildVocab:
    def test_most_frequent_pair_merges_first(self):
        # words aaab, aab: pair (a, ##a) and (##a, ##b) both occur twice;
        # (a, ##a) is seen first in corpus order, so "aa" must be created
        vocab = build_vocab(corpus_of_words("aaab", "aab"), target_size=12)
        assert "aa" in vocab.tokens
        assert len([t for t in vocab.tokens if t not in OVERLAP_TOKENS]) <= 12

    def test_empty_corpus_gives_specials_only(self):
        vocab = build_vocab(Corpus(ISNOTES_SCHEME, ()), target_size=10)
        assert vocab.tokens == CORE_SPECIALS + OVERLAP_TOKENS

    def test_size_too_small(self):
        with pytest.raises(ConfigError):
            build_vocab(corpus_of_words("abcdefgh"), target_size=8)

    def test_specials_have_fixed_ids(self, small_corpus):
        vocab = build_vocab(small_corpus, target_size=500)
        assert vocab.tokens[:4] == ("[PAD]", "[UNK]", "[CLS]", "[SEP]")
        assert [vocab.id_of(t) for t in CORE_SPECIALS] == [0, 1, 2, 3]
        for tok in OVERLAP_TOKENS:
            assert tok in vocab

    def test_bijection(self, small_corpus):
        vocab = build_vocab(small_corpus, target_size=500)
        assert len(set(vocab.tokens)) == len(vocab.tokens)
        for i, tok in enumerate(vocab.tokens):
            assert vocab.id_of(tok) == i
            assert vocab.token_of(i) == tok

    def test_deterministic_given_corpus_order(self, small_corpus):
        a = build_vocab(small_corpus, target_size=300)
        b = build_vocab(small_corpus, target_size=300)
        assert a.tokens == b.tokens

    def test_round_trip_over_training_words(self, small_corpus):
        vocab = build_vocab(small_corpus, target_size=400)
        for doc in small_corpus.documents[:4]:
            for sent in doc.sentences:
                for word in sent.tokens:
                    pieces = tokenize(word, vocab)
                    assert pieces != [UNK]
                    joined = pieces[0] + "".join(p[2:] for p in pieces[1:])
                    assert joined == word.lower()


class TestTokenize:
    VOCAB = Vocab(CORE_SPECIALS + OVERLAP_TOKENS +
                  ("pitch", "##ed", "p", "##i", "##t", "##c", "##h", "##e", "##d"))

    def test_word_in_vocab_is_identity(self):
        vocab = Vocab(CORE_SPECIALS + OVERLAP_TOKENS + ("friends",))
        assert tokenize("friends", vocab) == ["friends"]

    def test_greedy_longest_match(self):
        assert tokenize("pitched", self.VOCAB) == ["pitch", "##ed"]

    def test_unknown_character_maps_whole_word(self):
        assert tokenize("pitchez", self.VOCAB) == [UNK]

    def test_lowercases(self):
        assert tokenize("PITCHED", self.VOCAB) == ["pitch", "##ed"]

    def test_overlap_tokens_atomic(self):
        for tok in OVERLAP_TOKENS:
            assert tokenize(tok, self.VOCAB) == [tok]

    def test_specials_atomic(self):
        assert tokenize(CLS, self.VOCAB) == [CLS]
        assert tokenize(SEP, self.VOCAB) == [SEP]


def simple_ps(tokens, segments, mention_id="m0", label="new", span=None):
    return PseudoSentence(tuple(tokens), tuple(segments), mention_id, label,
                          span or (1, 1))


class TestEncode:
    def test_padding_and_mask(self):
        vocab = Vocab(CORE_SPECIALS + OVERLAP_TOKENS + ("x", "y"))
        ps = simple_ps([CLS, "x", SEP, "y", SEP], [0, 0, 0, 1, 1])
        enc = encode(ps, vocab, max_tokens=8)
        assert enc.length == 5
        assert list(enc.attention_mask) == [1, 1, 1, 1, 1, 0, 0, 0]
        assert list(enc.ids[5:]) == [PAD_ID] * 3
        assert list(enc.segment_ids[:5]) == [0, 0, 0, 1, 1]

    def test_segments_inherited_by_subwords(self, small_corpus):
        vocab = build_vocab(small_corpus, target_size=80)  # forces splitting
        doc = small_corpus.documents[0]
        mention = doc.sentences[0].mentions[0]
        ps = build_pseudo_sentence(mention, doc, ContextConfig(max_tokens=64))
        enc = encode(ps, vocab, 64)
        first_sep = list(enc.ids).index(vocab.id_of(SEP))
        assert all(s == 0 for s in enc.segment_ids[:first_sep + 1])
        assert all(s == 1 for s in enc.segment_ids[first_sep + 1:enc.length])

    def test_decode_round_trip(self, small_corpus):
        vocab = build_vocab(small_corpus, target_size=400)
        doc = small_corpus.documents[1]
        mention = doc.sentences[2].mentions[0]
        ps = build_pseudo_sentence(mention, doc, ContextConfig())
        enc = encode(ps, vocab, 128)
        assert decode(enc, vocab) == [t if t in CORE_SPECIALS + OVERLAP_TOKENS
                                      else t.lower() for t in ps.tokens]

    def test_overflow_retruncates_context(self):
        vocab = Vocab(CORE_SPECIALS + OVERLAP_TOKENS + ("a", "##a", "m"))
        # every "aaaa" word expands to 4 subwords
        tokens = [CLS] + ["aaaa"] * 6 + [SEP, "m", SEP]
        segments = [0] * 8 + [1, 1]
        ps = simple_ps(tokens, segments, span=(1, 7))
        enc = encode(ps, vocab, max_tokens=12)
        assert enc.length <= 12
        pieces = [vocab.token_of(int(i)) for i in enc.ids[:enc.length]]
        assert pieces[-2] == "m"                     # mention survives
        assert pieces.count(SEP) == 2

    def test_budget_error_when_mention_alone_overflows(self):
        vocab = Vocab(CORE_SPECIALS + OVERLAP_TOKENS + ("a", "##a"))
        tokens = [CLS, SEP, "aaaaaaaa", SEP]
        ps = simple_ps(tokens, [0, 0, 1, 1], span=(1, 1))
        with pytest.raises(BudgetError):
            encode(ps, vocab, max_tokens=6)

    @given(st.integers(0, 5000))
    def test_mask_matches_length(self, seed):
        corpus = gen_synthetic(SynthConfig(docs=1, sentences_per_doc=3), seed=seed % 50)
        vocab = build_vocab(corpus, target_size=200)
        doc = corpus.documents[0]
        mention = doc.sentences[seed % 3].mentions[0]
        ps = build_pseudo_sentence(mention, doc, ContextConfig(max_tokens=32))
        enc = encode(ps, vocab, 32)
        assert enc.ids.shape == enc.segment_ids.shape == enc.attention_mask.shape == (32,)
        assert enc.attention_mask.sum() == enc.length
        assert all(enc.attention_mask[:enc.length] == 1)


def test_vocab_save_load_round_trip(tmp_path, small_corpus):
    vocab = build_vocab(small_corpus, target_size=300)
    save_vocab(vocab, tmp_path / "vocab.txt")
    loaded = load_vocab(tmp_path / "vocab.txt")
    assert loaded.tokens == vocab.tokens
