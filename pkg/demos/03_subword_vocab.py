"""Learn a subword vocabulary by pair merging and encode an input with it."""

from infostatus.context import ContextConfig, build_pseudo_sentence
from infostatus.synth import SynthConfig, gen_synthetic
from infostatus.tokenizer import build_vocab, decode, encode, tokenize

corpus = gen_synthetic(SynthConfig(docs=20, sentences_per_doc=12), seed=7)

vocab = build_vocab(corpus, target_size=160)   # small budget forces splits
print(f"vocabulary size {len(vocab)} (4 specials + 6 overlap markers + units)")
print("first units:", ", ".join(vocab.tokens[10:30]))

print()
print("greedy longest-match segmentation")
print("---------------------------------")
for word in ("friends", "colleagues", "Poland", "surprised", "pre_overlap1=no"):
    print(f"{word:<18} -> {tokenize(word, vocab)}")

doc = corpus.documents[0]
mention = doc.sentences[3].mentions[0]
ps = build_pseudo_sentence(mention, doc, ContextConfig(max_tokens=48))
enc = encode(ps, vocab, max_tokens=48)
print()
print("encoded pseudo sentence")
print("-----------------------")
print("words:    ", " ".join(ps.tokens))
print("subwords: ", " ".join(vocab.token_of(int(i)) for i in enc.ids[:enc.length]))
print("segments: ", "".join(str(int(s)) for s in enc.segment_ids[:enc.length]))
print("mask sum = real length =", enc.length)
print("decode round-trip:", " ".join(decode(enc, vocab)))
