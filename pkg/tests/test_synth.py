"""The generator's gold labels must be re-derivable from text + state alone."""

import io

import pytest

from infostatus.corpus import save_corpus, validate_corpus
from infostatus.errors import ConfigError
from infostatus.synth import (COMPARATIVE_MARKERS, GAZETTEER, KINSHIP_NOUNS,
                              NOUN_LEMMAS, OF_NOUNS, PERSON_RELS,
                              PERSON_TRIGGERS, POSSESSIVE_PRONOUNS,
                              RELATIONAL_NOUNS, RISE_FALL_VERBS, SynthConfig,
                              TRIGGER_MAP, gen_synthetic)


def corpus_text(corpus):
    buf = io.StringIO()
    for doc in corpus.documents:
        for sent in doc.sentences:
            buf.write(" ".join(sent.tokens) + "\n")
    return buf.getvalue()


def test_deterministic_for_fixed_seed():
    a = gen_synthetic(SynthConfig(docs=6, sentences_per_doc=8), seed=9)
    b = gen_synthetic(SynthConfig(docs=6, sentences_per_doc=8), seed=9)
    assert a == b
    c = gen_synthetic(SynthConfig(docs=6, sentences_per_doc=8), seed=10)
    assert a != c


def test_config_errors():
    with pytest.raises(ConfigError):
        gen_synthetic(SynthConfig(docs=0, sentences_per_doc=5), seed=0)
    with pytest.raises(ConfigError):
        gen_synthetic(SynthConfig(docs=3, sentences_per_doc=0), seed=0)
    with pytest.raises(ConfigError):
        gen_synthetic(SynthConfig(docs=1, sentences_per_doc=1,
                                  weights={"bogus": 1.0}), seed=0)


def test_mention_invariants_hold(small_corpus):
    validate_corpus(small_corpus)
    for doc in small_corpus.documents:
        for sent in doc.sentences:
            for m in sent.mentions:
                assert 0 <= m.start < m.end <= len(sent.tokens)
                assert m.start <= m.head < m.end


def test_distribution_tracks_mixing_weights():
    config = SynthConfig(docs=100, sentences_per_doc=8)
    corpus = gen_synthetic(config, seed=11)
    counts: dict[str, int] = {}
    total = 0
    for doc in corpus.documents:
        for sent in doc.sentences:
            for m in sent.mentions:
                counts[m.label] = counts.get(m.label, 0) + 1
                total += 1
    assert total == 800
    for label, weight in config.weights.items():
        share = counts.get(label, 0) / total
        assert abs(share - weight) <= 0.02, (label, share, weight)


def _independent_rule_label(doc, sent_idx, mention):
    """Test-side replay of the generating rules, written from their wording."""
    sent = doc.sentences[sent_idx]
    span = tuple(t.lower() for t in sent.tokens[mention.start:mention.end])
    head = sent.tokens[mention.head].lower()
    prev_mentions = []
    for prev in doc.sentences[:sent_idx]:
        for m in prev.mentions:
            prev_mentions.append(
                (tuple(t.lower() for t in prev.tokens[m.start:m.end]),
                 prev.tokens[m.head].lower(), m.is_pronoun)
            )
    prev_words = {w for s, _, _ in prev_mentions for w in s}

    if mention.is_pronoun:
        return "old"
    if span[0] in COMPARATIVE_MARKERS:
        return "m/comparative"
    if "and" in span[1:-1]:
        return "m/aggregate"
    if "of" in span or "'s" in span or span[0] in POSSESSIVE_PRONOUNS:
        return "m/syntactic"
    if any(t.isdigit() for t in span) and mention.start > 0 and \
            sent.tokens[mention.start - 1].lower() in RISE_FALL_VERBS:
        return "m/function"
    if any(s == span for s, _, _ in prev_mentions):
        return "old"
    if len(span) == 1 and span[0].capitalize() in GAZETTEER and span[0] not in prev_words:
        return "m/worldKnowledge"
    if head in RELATIONAL_NOUNS and head not in prev_words:
        if head in PERSON_RELS:
            if any(p and s[0] in PERSON_TRIGGERS for s, _, p in prev_mentions):
                return "m/bridging"
        else:
            trigger = next(k for k, rels in TRIGGER_MAP.items() if head in rels)
            if trigger in prev_words:
                return "m/bridging"
    if span[0] in ("a", "an") and head not in prev_words:
        return "new"
    raise AssertionError(f"no rule matches mention {mention.mention_id}")


@pytest.mark.parametrize("seed", [0, 7, 123])
def test_every_label_follows_the_rules(seed):
    corpus = gen_synthetic(SynthConfig(docs=25, sentences_per_doc=14), seed=seed)
    checked = 0
    for doc in corpus.documents:
        for sent in doc.sentences:
            for mention in sent.mentions:
                assert _independent_rule_label(doc, sent.index, mention) == mention.label
                checked += 1
    assert checked == 25 * 14


def find_friends_seed():
    """Seed whose two-sentence document is the classic bridging pattern."""
    config = SynthConfig(docs=1, sentences_per_doc=2,
                         weights={"old": 0.5, "m/bridging": 0.5})
    target = (("She", "made", "money", "."), ("Friends", "pitched", "in", "."))
    for seed in range(20000):
        corpus = gen_synthetic(config, seed)
        got = tuple(s.tokens for s in corpus.documents[0].sentences)
        if got == target:
            return seed
    return None


# frozen from find_friends_seed(); regenerate if the realizers change
FRIENDS_SEED = 6007


def test_friends_pitched_in_pattern():
    config = SynthConfig(docs=1, sentences_per_doc=2,
                         weights={"old": 0.5, "m/bridging": 0.5})
    corpus = gen_synthetic(config, FRIENDS_SEED)
    sents = corpus.documents[0].sentences
    assert tuple(sents[0].tokens) == ("She", "made", "money", ".")
    assert tuple(sents[1].tokens) == ("Friends", "pitched", "in", ".")
    assert sents[0].mentions[0].label == "old"
    assert sents[0].mentions[0].is_pronoun
    assert sents[1].mentions[0].label == "m/bridging"


def test_bridging_always_has_prior_trigger(small_corpus):
    for doc in small_corpus.documents:
        for sent in doc.sentences:
            for m in sent.mentions:
                if m.label != "m/bridging":
                    continue
                assert sent.index > 0
                head = sent.tokens[m.head].lower()
                prev_words = set()
                person = False
                for prev in doc.sentences[:sent.index]:
                    for pm in prev.mentions:
                        prev_words.update(
                            t.lower() for t in prev.tokens[pm.start:pm.end])
                        if pm.is_pronoun and prev.tokens[pm.start].lower() in PERSON_TRIGGERS:
                            person = True
                if head in PERSON_RELS:
                    assert person
                else:
                    trigger = next(k for k, rels in TRIGGER_MAP.items() if head in rels)
                    assert trigger in prev_words


def test_vocabulary_pools_disjoint():
    pools = {
        "gazetteer": {n.lower() for n in GAZETTEER},
        "lemmas": {w for pair in NOUN_LEMMAS for w in pair},
        "relational": set(RELATIONAL_NOUNS),
        "kinship": set(KINSHIP_NOUNS),
        "of_nouns": set(OF_NOUNS),
    }
    names = list(pools)
    for i, a in enumerate(names):
        for b in names[i + 1:]:
            assert not pools[a] & pools[b], (a, b, pools[a] & pools[b])


def test_generator_output_is_saveable(tmp_path, small_corpus):
    save_corpus(small_corpus, tmp_path / "synth.jsonl")
