"""From-scratch multi-head self-attention encoder with a [CLS] classifier.

Forward pass: summed token/position/segment embeddings feed a stack of
pre-classification encoder blocks (masked scaled dot-product attention with
softmax over unmasked keys, residual + layer norm, GELU feed-forward,
residual + layer norm); the classifier reads the final hidden state of the
[CLS] token.  Backpropagation is exact and hand-derived; the optimizer is
bias-corrected adaptive moments.  Everything runs on numpy arrays, float32
for training and float64 on demand for gradient checks.
"""

from __future__ import annotations

import json
import struct
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path

import numpy as np
from scipy.special import erf

from .context import ContextConfig, build_instances
from .corpus import Corpus, Document, LabelScheme
from .errors import ConfigError, InvariantError, ShapeError
from .tokenizer import EncodedInput, Vocab, build_vocab, encode

_LN_EPS = 1e-5
_MASK_BIAS = 1e30
_INV_SQRT_2 = 1.0 / np.sqrt(2.0)
_INV_SQRT_2PI = 1.0 / np.sqrt(2.0 * np.pi)

ADAM_BETA1 = 0.9
ADAM_BETA2 = 0.999
ADAM_EPS = 1e-8


@dataclass(frozen=True)
class ModelConfig:
    layers: int
    heads: int
    hidden: int
    ff: int
    max_positions: int
    vocab_size: int
    n_classes: int
    dropout: float = 0.1
    seed: int = 0

    def validate(self) -> None:
        sizes = {
            "layers": self.layers, "heads": self.heads, "hidden": self.hidden,
            "ff": self.ff, "max_positions": self.max_positions,
            "vocab_size": self.vocab_size, "n_classes": self.n_classes,
        }
        for name, value in sizes.items():
            if value <= 0:
                raise ConfigError(f"{name} must be positive, got {value}")
        if self.hidden % self.heads != 0:
            raise ConfigError(
                f"hidden size {self.hidden} is not divisible by {self.heads} heads"
            )
        if not 0.0 <= self.dropout < 1.0:
            raise ConfigError(f"dropout must lie in [0, 1), got {self.dropout}")

    @property
    def head_dim(self) -> int:
        return self.hidden // self.heads


# Desk-scale and paper-scale encoder shapes (the latter mirrors the large
# published configuration; it is far beyond desk-scale training budgets).
ENCODER_PRESETS = {
    "desk": dict(layers=2, heads=4, hidden=128, ff=512, dropout=0.1),
    "large": dict(layers=24, heads=16, hidden=1024, ff=4096, dropout=0.1),
}


def desk_model_config(vocab_size: int, n_classes: int, max_positions: int,
                      seed: int = 0) -> ModelConfig:
    return ModelConfig(max_positions=max_positions, vocab_size=vocab_size,
                       n_classes=n_classes, seed=seed, **ENCODER_PRESETS["desk"])


def _trunc_normal(rng: np.random.Generator, shape, std: float, dtype) -> np.ndarray:
    x = rng.normal(0.0, std, size=shape)
    bad = np.abs(x) > 2.0 * std
    while bad.any():
        x[bad] = rng.normal(0.0, std, size=int(bad.sum()))
        bad = np.abs(x) > 2.0 * std
    return x.astype(dtype)


def init_params(config: ModelConfig, dtype=np.float32) -> dict[str, np.ndarray]:
    """Seed-deterministic parameters: truncated normal(0, 0.02) weights,
    unit layer-norm scales, zero offsets and biases."""
    config.validate()
    rng = np.random.default_rng(config.seed)
    d, f = config.hidden, config.ff

    def w(shape):
        return _trunc_normal(rng, shape, 0.02, dtype)

    def zeros(shape):
        return np.zeros(shape, dtype=dtype)

    def ones(shape):
        return np.ones(shape, dtype=dtype)

    params: dict[str, np.ndarray] = {
        "tok_emb": w((config.vocab_size, d)),
        "pos_emb": w((config.max_positions, d)),
        "seg_emb": w((2, d)),
    }
    for i in range(config.layers):
        p = f"l{i}."
        params[p + "attn.wq"] = w((d, d))
        params[p + "attn.bq"] = zeros(d)
        params[p + "attn.wk"] = w((d, d))
        params[p + "attn.bk"] = zeros(d)
        params[p + "attn.wv"] = w((d, d))
        params[p + "attn.bv"] = zeros(d)
        params[p + "attn.wo"] = w((d, d))
        params[p + "attn.bo"] = zeros(d)
        params[p + "ln1.g"] = ones(d)
        params[p + "ln1.b"] = zeros(d)
        params[p + "ffn.w1"] = w((d, f))
        params[p + "ffn.b1"] = zeros(f)
        params[p + "ffn.w2"] = w((f, d))
        params[p + "ffn.b2"] = zeros(d)
        params[p + "ln2.g"] = ones(d)
        params[p + "ln2.b"] = zeros(d)
    params["cls.w"] = w((d, config.n_classes))
    params["cls.b"] = zeros(config.n_classes)
    return params


def _gelu(x: np.ndarray) -> np.ndarray:
    return 0.5 * x * (1.0 + erf(x * _INV_SQRT_2))


def _gelu_grad(x: np.ndarray) -> np.ndarray:
    return 0.5 * (1.0 + erf(x * _INV_SQRT_2)) + x * np.exp(-0.5 * x * x) * _INV_SQRT_2PI


def _layer_norm(x: np.ndarray, g: np.ndarray, b: np.ndarray):
    mu = x.mean(axis=-1, keepdims=True)
    centered = x - mu
    var = (centered * centered).mean(axis=-1, keepdims=True)
    inv = 1.0 / np.sqrt(var + _LN_EPS)
    xhat = centered * inv
    return xhat * g + b, (xhat, inv)


def _layer_norm_backward(dy: np.ndarray, cache, g: np.ndarray):
    xhat, inv = cache
    dg = (dy * xhat).sum(axis=(0, 1))
    db = dy.sum(axis=(0, 1))
    dxhat = dy * g
    dx = inv * (
        dxhat
        - dxhat.mean(axis=-1, keepdims=True)
        - xhat * (dxhat * xhat).mean(axis=-1, keepdims=True)
    )
    return dx, dg, db


def _split_heads(x: np.ndarray, heads: int) -> np.ndarray:
    b, t, d = x.shape
    return x.reshape(b, t, heads, d // heads).transpose(0, 2, 1, 3)


def _merge_heads(x: np.ndarray) -> np.ndarray:
    b, h, t, dh = x.shape
    return x.transpose(0, 2, 1, 3).reshape(b, t, h * dh)


def _dropout_mask(rng: np.random.Generator, shape, rate: float, dtype) -> np.ndarray:
    keep = (rng.random(shape) >= rate).astype(dtype)
    return keep / dtype.type(1.0 - rate)


def _forward_batch(params, config: ModelConfig, ids, segs, mask,
                   train_rng: np.random.Generator | None = None,
                   collect_attention: bool = False):
    """Batched forward pass.  Returns (logits, caches, attentions).

    mask marks real tokens; masked keys receive exactly zero attention.
    Dropout is active only when train_rng is given.
    """
    if ids.ndim != 2 or ids.shape != segs.shape or ids.shape != mask.shape:
        raise ShapeError(f"inconsistent input shapes {ids.shape}, {segs.shape}, {mask.shape}")
    b, t = ids.shape
    if t > config.max_positions:
        raise ShapeError(f"sequence length {t} exceeds max_positions {config.max_positions}")
    if int(ids.max(initial=0)) >= config.vocab_size:
        raise ShapeError("token id outside the embedding table")
    dtype = params["tok_emb"].dtype
    rate = config.dropout
    dropping = train_rng is not None and rate > 0.0

    fmask = mask.astype(dtype)
    attn_bias = ((fmask - 1.0) * dtype.type(_MASK_BIAS))[:, None, None, :]
    scale = dtype.type(1.0 / np.sqrt(config.head_dim))

    x = params["tok_emb"][ids] + params["pos_emb"][:t][None, :, :] + params["seg_emb"][segs]
    emb_drop = None
    if dropping:
        emb_drop = _dropout_mask(train_rng, x.shape, rate, dtype)
        x = x * emb_drop

    caches = {"ids": ids, "segs": segs, "emb_drop": emb_drop, "layers": []}
    attentions = [] if collect_attention else None

    for i in range(config.layers):
        p = f"l{i}."
        x_in = x
        q = _split_heads(x_in @ params[p + "attn.wq"] + params[p + "attn.bq"], config.heads)
        k = _split_heads(x_in @ params[p + "attn.wk"] + params[p + "attn.bk"], config.heads)
        v = _split_heads(x_in @ params[p + "attn.wv"] + params[p + "attn.bv"], config.heads)
        scores = np.matmul(q, k.transpose(0, 1, 3, 2)) * scale + attn_bias
        scores -= scores.max(axis=-1, keepdims=True)
        expd = np.exp(scores)
        attn = expd / expd.sum(axis=-1, keepdims=True)
        if collect_attention:
            attentions.append(attn)
        attn_drop = None
        attn_used = attn
        if dropping:
            attn_drop = _dropout_mask(train_rng, attn.shape, rate, dtype)
            attn_used = attn * attn_drop
        ctx = _merge_heads(np.matmul(attn_used, v))
        out = ctx @ params[p + "attn.wo"] + params[p + "attn.bo"]
        out_drop = None
        if dropping:
            out_drop = _dropout_mask(train_rng, out.shape, rate, dtype)
            out = out * out_drop
        r1 = x_in + out
        x1, ln1_cache = _layer_norm(r1, params[p + "ln1.g"], params[p + "ln1.b"])
        u = x1 @ params[p + "ffn.w1"] + params[p + "ffn.b1"]
        gelu_u = _gelu(u)
        f_out = gelu_u @ params[p + "ffn.w2"] + params[p + "ffn.b2"]
        ffn_drop = None
        if dropping:
            ffn_drop = _dropout_mask(train_rng, f_out.shape, rate, dtype)
            f_out = f_out * ffn_drop
        r2 = x1 + f_out
        x, ln2_cache = _layer_norm(r2, params[p + "ln2.g"], params[p + "ln2.b"])
        caches["layers"].append({
            "x_in": x_in, "q": q, "k": k, "v": v, "attn": attn,
            "attn_drop": attn_drop, "attn_used": attn_used, "ctx": ctx,
            "out_drop": out_drop, "ln1": ln1_cache, "x1": x1, "u": u,
            "gelu_u": gelu_u, "ffn_drop": ffn_drop, "ln2": ln2_cache,
        })

    caches["x_final"] = x
    cls_hidden = x[:, 0, :]
    logits = cls_hidden @ params["cls.w"] + params["cls.b"]
    return logits, caches, attentions


@dataclass(frozen=True)
class ForwardTrace:
    logits: np.ndarray
    attentions: np.ndarray | None   # (layers, heads, len, len)
    cls_hidden: np.ndarray


def forward(params, config: ModelConfig, enc: EncodedInput,
            train_mode: bool = False, train_rng: np.random.Generator | None = None,
            collect_attention: bool = True) -> ForwardTrace:
    """Run one encoded input through the model.

    When attention is collected, every row is checked to sum to one over
    unmasked keys with exact zeros on masked keys.
    """
    if len(enc.ids) != config.max_positions:
        raise ShapeError(
            f"input length {len(enc.ids)} != max_positions {config.max_positions}"
        )
    rng = train_rng if train_mode else None
    if train_mode and rng is None:
        rng = np.random.default_rng(config.seed)
    logits, caches, attns = _forward_batch(
        params, config, enc.ids[None, :], enc.segment_ids[None, :],
        enc.attention_mask[None, :], train_rng=rng,
        collect_attention=collect_attention,
    )
    attentions = None
    if collect_attention:
        attentions = np.stack([a[0] for a in attns])  # (L, H, T, T)
        real = enc.attention_mask.astype(bool)
        row_sums = attentions.sum(axis=-1)
        if not np.allclose(row_sums, 1.0, atol=1e-6):
            raise InvariantError("attention rows do not sum to 1 over unmasked keys")
        if attentions[:, :, :, ~real].any():
            raise InvariantError("masked keys received nonzero attention")
    return ForwardTrace(logits[0], attentions, caches["x_final"][0, 0, :])


def loss_and_grad(params, config: ModelConfig, ids, segs, mask, labels,
                  train_rng: np.random.Generator | None = None):
    """Mean cross-entropy over the batch and exact gradients for every
    parameter tensor (dropout active only when train_rng is given)."""
    labels = np.asarray(labels)
    if labels.ndim != 1 or labels.shape[0] != ids.shape[0]:
        raise ShapeError("labels must align with the batch")
    if int(labels.max(initial=0)) >= config.n_classes or int(labels.min(initial=0)) < 0:
        raise ShapeError("label index outside n_classes")
    dtype = params["tok_emb"].dtype
    b, t = ids.shape

    logits, caches, _ = _forward_batch(params, config, ids, segs, mask,
                                       train_rng=train_rng)
    shifted = logits - logits.max(axis=1, keepdims=True)
    exp_l = np.exp(shifted)
    probs = exp_l / exp_l.sum(axis=1, keepdims=True)
    log_probs = shifted - np.log(exp_l.sum(axis=1, keepdims=True))
    loss = float(-log_probs[np.arange(b), labels].mean())

    grads = {name: np.zeros_like(p) for name, p in params.items()}
    dlogits = probs.copy()
    dlogits[np.arange(b), labels] -= 1.0
    dlogits /= dtype.type(b)

    x_final = caches["x_final"]
    cls_hidden = x_final[:, 0, :]
    grads["cls.w"] = cls_hidden.T @ dlogits
    grads["cls.b"] = dlogits.sum(axis=0)
    dx = np.zeros_like(x_final)
    dx[:, 0, :] = dlogits @ params["cls.w"].T

    scale = dtype.type(1.0 / np.sqrt(config.head_dim))
    for i in reversed(range(config.layers)):
        p = f"l{i}."
        c = caches["layers"][i]
        dr2, dg2, db2 = _layer_norm_backward(dx, c["ln2"], params[p + "ln2.g"])
        grads[p + "ln2.g"] = dg2
        grads[p + "ln2.b"] = db2
        dx1 = dr2.copy()
        df = dr2
        if c["ffn_drop"] is not None:
            df = df * c["ffn_drop"]
        flat_g = c["gelu_u"].reshape(-1, config.ff)
        grads[p + "ffn.w2"] = flat_g.T @ df.reshape(-1, config.hidden)
        grads[p + "ffn.b2"] = df.sum(axis=(0, 1))
        dgelu = df @ params[p + "ffn.w2"].T
        du = dgelu * _gelu_grad(c["u"])
        flat_x1 = c["x1"].reshape(-1, config.hidden)
        grads[p + "ffn.w1"] = flat_x1.T @ du.reshape(-1, config.ff)
        grads[p + "ffn.b1"] = du.sum(axis=(0, 1))
        dx1 += du @ params[p + "ffn.w1"].T

        dr1, dg1, db1 = _layer_norm_backward(dx1, c["ln1"], params[p + "ln1.g"])
        grads[p + "ln1.g"] = dg1
        grads[p + "ln1.b"] = db1
        dx_in = dr1.copy()
        dout = dr1
        if c["out_drop"] is not None:
            dout = dout * c["out_drop"]
        flat_ctx = c["ctx"].reshape(-1, config.hidden)
        grads[p + "attn.wo"] = flat_ctx.T @ dout.reshape(-1, config.hidden)
        grads[p + "attn.bo"] = dout.sum(axis=(0, 1))
        dctx = _split_heads(dout @ params[p + "attn.wo"].T, config.heads)

        dattn_used = np.matmul(dctx, c["v"].transpose(0, 1, 3, 2))
        dv = np.matmul(c["attn_used"].transpose(0, 1, 3, 2), dctx)
        dattn = dattn_used
        if c["attn_drop"] is not None:
            dattn = dattn * c["attn_drop"]
        attn = c["attn"]
        dscores = attn * (dattn - (dattn * attn).sum(axis=-1, keepdims=True))
        dq = np.matmul(dscores, c["k"]) * scale
        dk = np.matmul(dscores.transpose(0, 1, 3, 2), c["q"]) * scale

        x_in = c["x_in"]
        flat_x = x_in.reshape(-1, config.hidden)
        for name, dhead in (("q", dq), ("k", dk), ("v", dv)):
            dmerged = _merge_heads(dhead)
            grads[p + f"attn.w{name}"] = flat_x.T @ dmerged.reshape(-1, config.hidden)
            grads[p + f"attn.b{name}"] = dmerged.sum(axis=(0, 1))
            dx_in += dmerged @ params[p + f"attn.w{name}"].T
        dx = dx_in

    if caches["emb_drop"] is not None:
        dx = dx * caches["emb_drop"]
    np.add.at(grads["tok_emb"], caches["ids"].ravel(), dx.reshape(-1, config.hidden))
    grads["pos_emb"][:t] = dx.sum(axis=0)
    np.add.at(grads["seg_emb"], caches["segs"].ravel(), dx.reshape(-1, config.hidden))
    return loss, grads


def init_adam_state(params) -> dict:
    return {
        "step": 0,
        "m": {k: np.zeros_like(v) for k, v in params.items()},
        "v": {k: np.zeros_like(v) for k, v in params.items()},
    }


def adam_step(params, grads, state, lr: float):
    """One bias-corrected adaptive-moment update, in place."""
    if set(grads) != set(params) or set(state["m"]) != set(params):
        raise ShapeError("gradient/state keys do not match parameters")
    state["step"] += 1
    t = state["step"]
    bc1 = 1.0 - ADAM_BETA1 ** t
    bc2 = 1.0 - ADAM_BETA2 ** t
    for key, p in params.items():
        g = grads[key]
        if g.shape != p.shape:
            raise ShapeError(f"gradient shape mismatch for {key}")
        m = state["m"][key]
        v = state["v"][key]
        m *= ADAM_BETA1
        m += (1.0 - ADAM_BETA1) * g
        v *= ADAM_BETA2
        v += (1.0 - ADAM_BETA2) * g * g
        p -= lr * (m / bc1) / (np.sqrt(v / bc2) + ADAM_EPS)
    return params, state


@dataclass(frozen=True)
class TrainConfig:
    epochs: int = 8
    lr: float = 1e-3
    batch_size: int = 32
    seed: int = 0
    warmup_frac: float = 0.1
    vocab_target: int = 2000

    def validate(self) -> None:
        if self.epochs < 0 or self.batch_size < 1:
            raise ConfigError("epochs must be >= 0 and batch_size >= 1")
        if not 0.0 <= self.warmup_frac <= 1.0:
            raise ConfigError("warmup_frac must lie in [0, 1]")


@dataclass(frozen=True)
class Profile:
    """A named bundle of training hyperparameters and the input budget."""
    epochs: int
    lr: float
    batch_size: int
    max_tokens: int


PROFILES = {
    "paper": Profile(epochs=3, lr=3e-5, batch_size=32, max_tokens=128),
    "desk": Profile(epochs=8, lr=1e-3, batch_size=32, max_tokens=48),
}


@dataclass(frozen=True)
class TrainedModel:
    params: dict
    config: ModelConfig
    vocab: Vocab
    context: ContextConfig
    scheme: LabelScheme
    log: tuple[float, ...] = field(default_factory=tuple)


def _stack(encs: list[EncodedInput]):
    ids = np.stack([e.ids for e in encs])
    segs = np.stack([e.segment_ids for e in encs])
    mask = np.stack([e.attention_mask for e in encs])
    return ids, segs, mask


def _trim(ids, segs, mask):
    longest = int(mask.sum(axis=1).max(initial=1))
    return ids[:, :longest], segs[:, :longest], mask[:, :longest]


def train(train_corpus: Corpus, context_cfg: ContextConfig,
          model_template: ModelConfig, train_cfg: TrainConfig) -> TrainedModel:
    """Build a vocabulary on the fold, encode its mentions, and fit the
    encoder with linear warmup then linear decay.  Fully seed-deterministic."""
    train_cfg.validate()
    context_cfg.validate()
    scheme = train_corpus.scheme
    if train_corpus.total_mentions() == 0:
        raise ConfigError("training fold has no mentions")
    vocab = build_vocab(train_corpus, train_cfg.vocab_target)
    instances = build_instances(train_corpus.documents, context_cfg)
    encs = [encode(ps, vocab, context_cfg.max_tokens) for ps in instances]
    ids, segs, mask = _stack(encs)
    labels = np.array([scheme.index_of(e.gold_label) for e in encs], dtype=np.int64)

    config = replace(model_template, vocab_size=len(vocab),
                     n_classes=len(scheme), max_positions=context_cfg.max_tokens)
    params = init_params(config)
    state = init_adam_state(params)
    rng = np.random.default_rng(train_cfg.seed)

    n = len(encs)
    batches_per_epoch = (n + train_cfg.batch_size - 1) // train_cfg.batch_size
    total_steps = train_cfg.epochs * batches_per_epoch
    warmup = max(1, int(round(train_cfg.warmup_frac * total_steps)))

    log: list[float] = []
    step = 0
    for _ in range(train_cfg.epochs):
        order = rng.permutation(n)
        epoch_losses = []
        for start in range(0, n, train_cfg.batch_size):
            batch = order[start:start + train_cfg.batch_size]
            b_ids, b_segs, b_mask = _trim(ids[batch], segs[batch], mask[batch])
            step += 1
            if step <= warmup:
                lr = train_cfg.lr * step / warmup
            else:
                lr = train_cfg.lr * (total_steps - step + 1) / max(1, total_steps - warmup)
            loss, grads = loss_and_grad(params, config, b_ids, b_segs, b_mask,
                                        labels[batch], train_rng=rng)
            adam_step(params, grads, state, lr)
            epoch_losses.append(loss)
        log.append(float(np.mean(epoch_losses)))

    return TrainedModel(params, config, vocab, context_cfg, scheme, tuple(log))


def predict(params, config: ModelConfig, inputs: list[EncodedInput],
            batch_size: int = 256) -> np.ndarray:
    """Argmax class indices for a list of encoded inputs (no dropout); ties
    break toward the lowest class index."""
    return np.argmax(predict_logits(params, config, inputs, batch_size), axis=1)


def predict_logits(params, config: ModelConfig, inputs: list[EncodedInput],
                   batch_size: int = 256) -> np.ndarray:
    out = []
    for start in range(0, len(inputs), batch_size):
        chunk = inputs[start:start + batch_size]
        ids, segs, mask = _trim(*_stack(chunk))
        logits, _, _ = _forward_batch(params, config, ids, segs, mask)
        out.append(logits)
    if not out:
        return np.zeros((0, config.n_classes), dtype=params["tok_emb"].dtype)
    return np.concatenate(out)


@dataclass(frozen=True)
class PredRecord:
    doc_id: str
    mention_id: str
    gold: str
    predicted: str


def predict_corpus(model: TrainedModel, docs: list[Document]) -> list[PredRecord]:
    """Label every mention of the given documents; sliding-window variants
    average window logits per mention before the argmax."""
    encs: list[EncodedInput] = []
    groups: list[tuple[str, str, str, int]] = []  # doc, mention, gold, n_windows
    for doc in docs:
        instances = build_instances([doc], model.context)
        runs: dict[str, int] = {}
        for ps in instances:
            runs[ps.mention_id] = runs.get(ps.mention_id, 0) + 1
            encs.append(encode(ps, model.vocab, model.context.max_tokens))
        for sent in doc.sentences:
            for mention in sent.mentions:
                groups.append((doc.doc_id, mention.mention_id, mention.label,
                               runs[mention.mention_id]))
    logits = predict_logits(model.params, model.config, encs)

    records = []
    pos = 0
    for doc_id, mention_id, gold, n_windows in groups:
        mean_logits = logits[pos:pos + n_windows].mean(axis=0)
        pos += n_windows
        predicted = model.scheme.labels[int(np.argmax(mean_logits))]
        records.append(PredRecord(doc_id, mention_id, gold, predicted))
    if pos != len(encs):
        raise InvariantError("instance grouping does not cover all encoded inputs")
    return records


_CKPT_MAGIC = "infostatus-checkpoint-v1"


def save_checkpoint(model: TrainedModel, path: str | Path) -> None:
    """Self-describing header (configs, scheme, vocab, tensor manifest)
    followed by raw little-endian float32 tensors in manifest order."""
    header = {
        "format": _CKPT_MAGIC,
        "model": asdict(model.config),
        "context": asdict(model.context),
        "scheme": {"name": model.scheme.name, "labels": list(model.scheme.labels)},
        "vocab": list(model.vocab.tokens),
        "log": list(model.log),
        "tensors": [[name, list(t.shape)] for name, t in model.params.items()],
    }
    blob = json.dumps(header, ensure_ascii=False).encode("utf-8")
    with open(path, "wb") as fh:
        fh.write(struct.pack("<Q", len(blob)))
        fh.write(blob)
        for tensor in model.params.values():
            fh.write(np.ascontiguousarray(tensor, dtype="<f4").tobytes())


def load_checkpoint(path: str | Path) -> TrainedModel:
    with open(path, "rb") as fh:
        (blob_len,) = struct.unpack("<Q", fh.read(8))
        header = json.loads(fh.read(blob_len).decode("utf-8"))
        if header.get("format") != _CKPT_MAGIC:
            raise InvariantError(f"{path} is not an infostatus checkpoint")
        params = {}
        for name, shape in header["tensors"]:
            count = int(np.prod(shape)) if shape else 1
            raw = fh.read(count * 4)
            params[name] = np.frombuffer(raw, dtype="<f4").reshape(shape).astype(np.float32)
    return TrainedModel(
        params=params,
        config=ModelConfig(**header["model"]),
        vocab=Vocab(tuple(header["vocab"])),
        context=ContextConfig(**header["context"]),
        scheme=LabelScheme(header["scheme"]["name"], tuple(header["scheme"]["labels"])),
        log=tuple(header["log"]),
    )
