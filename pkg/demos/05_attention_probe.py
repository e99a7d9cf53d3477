"""Probe a trained model: which tokens does [CLS] attend per IS class?

Trains on most documents, probes the held-out ones, and prints the ranked
token table.  Indefinite articles should surface for `new`, pronouns and
overlap markers for `old`, comparison premodifiers for `m/comparative`.
"""

import os

os.environ.setdefault("OPENBLAS_NUM_THREADS", "1")

from infostatus.context import ContextConfig
from infostatus.corpus import split_kfold, subcorpus
from infostatus.model import ModelConfig, TrainConfig, train
from infostatus.probe import format_attention_table, probe_model
from infostatus.synth import SynthConfig, gen_synthetic

corpus = gen_synthetic(SynthConfig(docs=16, sentences_per_doc=15), seed=9)
train_ids, test_ids = split_kfold(corpus, 4, seed=0)[0]

ctx = ContextConfig(max_tokens=40)
model_cfg = ModelConfig(layers=2, heads=4, hidden=64, ff=128, max_positions=40,
                        vocab_size=1, n_classes=1, dropout=0.1, seed=0)
trained = train(subcorpus(corpus, train_ids), ctx, model_cfg,
                TrainConfig(epochs=8, lr=1e-3, batch_size=32, seed=0))
print("training loss per epoch:",
      " ".join(f"{loss:.3f}" for loss in trained.log))

test_docs = list(subcorpus(corpus, test_ids).documents)
summary = probe_model(trained, test_docs, k=8)
print()
print(format_attention_table(summary, labels=trained.scheme.labels))
