"""Build the model inputs: overlap features and framed pseudo sentences.

Shows the classic bridging configuration ("She made money . Friends
pitched in .") where the second sentence's mention has no string or head
overlap with the previous context, plus the repeated-name configuration
where overlap flips to yes/yes, and the ablation variants.
"""

from infostatus.context import (ContextConfig, build_pseudo_sentence,
                                compute_overlap)
from infostatus.corpus import Document, Mention, Sentence

friends = Document("friends", (
    Sentence(0, ("She", "made", "money", "."),
             (Mention("m0", 0, 1, 0, True, "old"),)),
    Sentence(1, ("Friends", "pitched", "in", "."),
             (Mention("m1", 0, 1, 0, False, "m/bridging"),)),
))

poland = Document("poland", (
    Sentence(0, ("In", "Poland", ",", "investment", "is", "low", "."),
             (Mention("p0", 1, 2, 1, False, "m/worldKnowledge"),)),
    Sentence(1, ("A", "farmer", "in", "Poland", "is", "free", "."),
             (Mention("p1", 3, 4, 3, False, "old"),)),
))

print("overlap features")
print("----------------")
for doc, mention in [(friends, friends.sentences[0].mentions[0]),
                     (friends, friends.sentences[1].mentions[0]),
                     (poland, poland.sentences[1].mentions[0])]:
    ov = compute_overlap(mention, doc)
    sent = doc.sentences[[s for s in doc.sentences
                          for m in s.mentions if m is mention][0].index]
    span = " ".join(sent.tokens[mention.start:mention.end])
    print(f"{doc.doc_id}/{span!r}: string={ov.string_overlap} head={ov.head_overlap}")

print()
print("pseudo sentences (full model and ablations)")
print("-------------------------------------------")
mention = friends.sentences[1].mentions[0]
variants = {
    "full": ContextConfig(),
    "wo overlap": ContextConfig(include_overlap=False),
    "wo local": ContextConfig(include_local_context=False),
    "mention only": ContextConfig(include_local_context=False,
                                  include_overlap=False),
    "with previous sentence": ContextConfig(extra_prev_sentences=1),
}
for name, cfg in variants.items():
    ps = build_pseudo_sentence(mention, friends, cfg)
    print(f"{name:<24} {' '.join(ps.tokens)}")

print()
print("truncation: a 12-token budget trims the context tail only")
ps = build_pseudo_sentence(mention, friends, ContextConfig(
    extra_prev_sentences=1, max_tokens=12))
print(" ".join(ps.tokens))
