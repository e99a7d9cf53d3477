"""Subword vocabulary learned from training text, and input encoding.

The vocabulary is built by greedy pair merging over word-internal character
units (continuation pieces carry a ``##`` prefix).  Ties between equally
frequent pairs go to the pair first encountered in corpus order, which makes
construction deterministic given corpus order and target size.  Words are
lowercased before tokenization.  The four framing specials hold fixed ids
and the six overlap markers ride along outside the size budget; none of
them is ever split.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .context import CLS, OVERLAP_TOKENS, SEP, PseudoSentence, drop_last_context_word
from .corpus import Corpus
from .errors import BudgetError, ConfigError

PAD = "[PAD]"
UNK = "[UNK]"
CORE_SPECIALS = (PAD, UNK, CLS, SEP)
PAD_ID, UNK_ID, CLS_ID, SEP_ID = 0, 1, 2, 3

_CONT = "##"


@dataclass(frozen=True)
class Vocab:
    tokens: tuple[str, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "_ids", {t: i for i, t in enumerate(self.tokens)})

    def __len__(self) -> int:
        return len(self.tokens)

    def id_of(self, token: str) -> int:
        return self._ids.get(token, UNK_ID)

    def __contains__(self, token: str) -> bool:
        return token in self._ids

    def token_of(self, idx: int) -> str:
        return self.tokens[idx]


def _word_units(word: str) -> list[str]:
    return [word[0]] + [_CONT + c for c in word[1:]]


def build_vocab(corpus: Corpus, target_size: int) -> Vocab:
    """Learn a subword vocabulary from the corpus tokens by pair merging.

    target_size bounds specials + alphabet + merged units; the overlap
    markers are appended for free.  Raises ConfigError if the budget cannot
    even hold the alphabet.
    """
    counts: dict[str, int] = {}
    first_seen: dict[str, int] = {}
    for doc in corpus.documents:
        for sent in doc.sentences:
            for tok in sent.tokens:
                word = tok.lower()
                counts[word] = counts.get(word, 0) + 1
                first_seen.setdefault(word, len(first_seen))
    words = sorted(counts, key=first_seen.__getitem__)
    segmentations = {w: _word_units(w) for w in words}

    alphabet: list[str] = []
    seen: set[str] = set()
    for w in words:
        for unit in segmentations[w]:
            if unit not in seen:
                seen.add(unit)
                alphabet.append(unit)

    if target_size <= len(CORE_SPECIALS) + len(alphabet):
        raise ConfigError(
            f"target_size {target_size} cannot hold {len(CORE_SPECIALS)} specials "
            f"plus an alphabet of {len(alphabet)}"
        )

    merged: list[str] = []
    size = len(CORE_SPECIALS) + len(alphabet)
    while size < target_size:
        pair_counts: dict[tuple[str, str], int] = {}
        pair_first: dict[tuple[str, str], int] = {}
        order = 0
        for w in words:
            units = segmentations[w]
            for a, b in zip(units, units[1:]):
                pair_counts[(a, b)] = pair_counts.get((a, b), 0) + counts[w]
                if (a, b) not in pair_first:
                    pair_first[(a, b)] = order
                order += 1
        if not pair_counts:
            break
        best = min(pair_counts, key=lambda p: (-pair_counts[p], pair_first[p]))
        new_unit = best[0] + best[1][len(_CONT):]
        for w in words:
            units = segmentations[w]
            out = []
            i = 0
            while i < len(units):
                if i + 1 < len(units) and (units[i], units[i + 1]) == best:
                    out.append(new_unit)
                    i += 2
                else:
                    out.append(units[i])
                    i += 1
            segmentations[w] = out
        merged.append(new_unit)
        size += 1

    return Vocab(CORE_SPECIALS + OVERLAP_TOKENS + tuple(alphabet) + tuple(merged))


def tokenize(word: str, vocab: Vocab) -> list[str]:
    """Greedy longest-match-first segmentation of one (lowercased) word.

    Specials and overlap markers are atomic; a word with any unmatchable
    character maps to a single [UNK].
    """
    if word in CORE_SPECIALS or word in OVERLAP_TOKENS:
        return [word]
    word = word.lower()
    pieces: list[str] = []
    pos = 0
    while pos < len(word):
        prefix = _CONT if pos > 0 else ""
        end = len(word)
        while end > pos:
            candidate = prefix + word[pos:end]
            if candidate in vocab:
                pieces.append(candidate)
                break
            end -= 1
        else:
            return [UNK]
        pos = end
    return pieces


@dataclass(frozen=True)
class EncodedInput:
    """Fixed-length id view of a pseudo sentence.

    All four sequences have length max_tokens (right-padded); words maps each
    real position back to its source word for attention aggregation.
    """

    ids: np.ndarray
    segment_ids: np.ndarray
    attention_mask: np.ndarray
    length: int
    words: tuple[str, ...]
    mention_id: str
    gold_label: str


def encode(ps: PseudoSentence, vocab: Vocab, max_tokens: int) -> EncodedInput:
    """Expand a pseudo sentence to subword ids, re-truncating the context
    region if subword expansion overflows the budget."""
    while True:
        pieces: list[str] = []
        words: list[str] = []
        segments: list[int] = []
        for tok, seg in zip(ps.tokens, ps.segment_ids):
            sub = tokenize(tok, vocab)
            word = tok if tok in CORE_SPECIALS or tok in OVERLAP_TOKENS else tok.lower()
            pieces.extend(sub)
            words.extend([word] * len(sub))
            segments.extend([seg] * len(sub))
        if len(pieces) <= max_tokens:
            break
        start, end = ps.context_span
        if end <= start:
            raise BudgetError(
                f"mention subwords and specials exceed the budget of {max_tokens} "
                f"for mention {ps.mention_id!r}"
            )
        ps = drop_last_context_word(ps)

    length = len(pieces)
    ids = np.full(max_tokens, PAD_ID, dtype=np.int32)
    ids[:length] = [vocab.id_of(p) for p in pieces]
    segment_ids = np.zeros(max_tokens, dtype=np.int32)
    segment_ids[:length] = segments
    mask = np.zeros(max_tokens, dtype=np.int32)
    mask[:length] = 1
    return EncodedInput(ids, segment_ids, mask, length, tuple(words),
                        ps.mention_id, ps.gold_label)


def decode(enc: EncodedInput, vocab: Vocab) -> list[str]:
    """Rebuild word-level tokens from subword ids (inverse of encode up to
    lowercasing)."""
    out: list[str] = []
    for idx in enc.ids[:enc.length]:
        piece = vocab.token_of(int(idx))
        if piece.startswith(_CONT) and out:
            out[-1] += piece[len(_CONT):]
        else:
            out.append(piece)
    return out


def save_vocab(vocab: Vocab, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for token in vocab.tokens:
            fh.write(token + "\n")


def load_vocab(path) -> Vocab:
    with open(path, encoding="utf-8") as fh:
        return Vocab(tuple(line.rstrip("\n") for line in fh if line.rstrip("\n")))
