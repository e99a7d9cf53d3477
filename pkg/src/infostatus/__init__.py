"""Discourse context-aware information status classification.

Builds pseudo sentences from mentions and their discourse context, trains a
from-scratch multi-head self-attention encoder with a [CLS] classification
head, evaluates with document-level cross-validation, and probes trained
models for the most attended tokens per information-status class.
"""

from .context import (ContextConfig, OverlapFeature, PseudoSentence,
                      build_pseudo_sentence, compute_overlap, truncate_pseudo,
                      window_previous_context)
from .corpus import (ISNOTES_SCHEME, Corpus, CorpusStats, Document, LabelScheme,
                     Mention, Sentence, corpus_stats, load_corpus, save_corpus,
                     split_kfold, subcorpus)
from .errors import (BudgetError, ConfigError, InvariantError, SchemaError,
                     ShapeError)
from .evaluation import (CVResult, Metrics, cross_validate, format_report,
                         randomization_test, score)
from .model import (PROFILES, ForwardTrace, ModelConfig, TrainConfig,
                    TrainedModel, adam_step, desk_model_config, forward,
                    init_params, load_checkpoint, loss_and_grad, predict,
                    predict_corpus, save_checkpoint, train)
from .probe import (AttentionSummary, aggregate_attention, cls_attention_scores,
                    format_attention_table, probe_model)
from .synth import DEFAULT_MIX, SynthConfig, derive_label, gen_synthetic
from .tokenizer import EncodedInput, Vocab, build_vocab, decode, encode, tokenize

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
