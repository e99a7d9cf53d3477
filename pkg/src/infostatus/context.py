"""Previous-context overlap features and pseudo-sentence assembly.

The model input for a mention is a pseudo sentence

    [CLS] pre_overlap1=v pre_overlap2=v <context> [SEP] <mention> [SEP]

where the overlap markers record whether any mention in a *strictly earlier*
sentence shares the full token span / the head token with the target, the
context block holds optional previous sentences followed by the local
sentence, and segment ids are 0 through the first [SEP] and 1 after it.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

from .corpus import Document, Mention
from .errors import BudgetError, ConfigError, InvariantError

CLS = "[CLS]"
SEP = "[SEP]"

OVERLAP_VALUES = ("yes", "no", "NA")


def overlap_token(slot: int, value: str) -> str:
    return f"pre_overlap{slot}={value}"


# All six overlap markers, in a fixed order (string slot first, then head).
OVERLAP_TOKENS = tuple(
    overlap_token(slot, value) for slot in (1, 2) for value in OVERLAP_VALUES
)


@dataclass(frozen=True)
class OverlapFeature:
    string_overlap: str
    head_overlap: str

    def __post_init__(self) -> None:
        for v in (self.string_overlap, self.head_overlap):
            if v not in OVERLAP_VALUES:
                raise InvariantError(f"overlap value must be yes/no/NA, got {v!r}")
        if (self.string_overlap == "NA") != (self.head_overlap == "NA"):
            raise InvariantError("NA applies to both overlap fields or neither")

    def tokens(self) -> tuple[str, str]:
        return (overlap_token(1, self.string_overlap), overlap_token(2, self.head_overlap))


@dataclass(frozen=True)
class ContextConfig:
    include_mention: bool = True
    include_local_context: bool = True
    include_overlap: bool = True
    extra_prev_sentences: int = 0
    max_tokens: int = 128
    sliding_window_stride: int = 100
    all_previous_context: bool = False

    def validate(self) -> None:
        if not (self.include_mention or self.include_local_context or self.include_overlap):
            raise InvariantError("at least one pseudo-sentence part must be enabled")
        if self.extra_prev_sentences < 0:
            raise ConfigError("extra_prev_sentences must be >= 0")
        if self.max_tokens < 4:
            raise ConfigError("max_tokens must leave room for [CLS] a [SEP] b [SEP]")
        if self.sliding_window_stride <= 0:
            raise ConfigError("sliding_window_stride must be positive")


@dataclass(frozen=True)
class PseudoSentence:
    """Word-level model input; context_span marks the truncatable region."""

    tokens: tuple[str, ...]
    segment_ids: tuple[int, ...]
    mention_id: str
    gold_label: str
    context_span: tuple[int, int]

    def __len__(self) -> int:
        return len(self.tokens)


def _locate(mention: Mention, doc: Document):
    for sent in doc.sentences:
        for m in sent.mentions:
            if m.mention_id == mention.mention_id:
                if m != mention:
                    raise InvariantError(
                        f"mention {mention.mention_id!r} does not match the one stored in doc {doc.doc_id!r}"
                    )
                return sent
    raise InvariantError(f"mention {mention.mention_id!r} not found in doc {doc.doc_id!r}")


def compute_overlap(mention: Mention, doc: Document) -> OverlapFeature:
    """String/head overlap with mentions in strictly earlier sentences.

    Pronoun mentions get (NA, NA); matching is case-insensitive, full-span
    for the string slot and single-token for the head slot.
    """
    sent = _locate(mention, doc)
    if mention.is_pronoun:
        return OverlapFeature("NA", "NA")
    span = tuple(t.lower() for t in sent.tokens[mention.start:mention.end])
    head = sent.tokens[mention.head].lower()
    string_overlap = "no"
    head_overlap = "no"
    for prev in doc.sentences[:sent.index]:
        for m in prev.mentions:
            prev_span = tuple(t.lower() for t in prev.tokens[m.start:m.end])
            if prev_span == span:
                string_overlap = "yes"
            if prev.tokens[m.head].lower() == head:
                head_overlap = "yes"
    return OverlapFeature(string_overlap, head_overlap)


def _assemble(
    mention: Mention,
    local_tokens: tuple[str, ...],
    prev_tokens: tuple[str, ...],
    overlap: OverlapFeature | None,
    config: ContextConfig,
    gold_label: str,
) -> PseudoSentence:
    tokens: list[str] = [CLS]
    if overlap is not None:
        tokens.extend(overlap.tokens())
    context_start = len(tokens)
    tokens.extend(prev_tokens)
    if config.include_local_context:
        tokens.extend(local_tokens)
    context_end = len(tokens)
    tokens.append(SEP)
    if config.include_mention:
        tokens.extend(local_tokens[mention.start:mention.end])
    tokens.append(SEP)
    first_sep = context_end
    segment_ids = tuple(0 if i <= first_sep else 1 for i in range(len(tokens)))
    ps = PseudoSentence(
        tokens=tuple(tokens),
        segment_ids=segment_ids,
        mention_id=mention.mention_id,
        gold_label=gold_label,
        context_span=(context_start, context_end),
    )
    return truncate_pseudo(ps, config.max_tokens)


def build_pseudo_sentence(mention: Mention, doc: Document, config: ContextConfig) -> PseudoSentence:
    """Assemble the framed model input for one mention, truncated to budget."""
    config.validate()
    sent = _locate(mention, doc)
    overlap = compute_overlap(mention, doc) if config.include_overlap else None
    if config.all_previous_context:
        prev_sents = doc.sentences[:sent.index]
    elif config.extra_prev_sentences > 0:
        lo = max(0, sent.index - config.extra_prev_sentences)
        prev_sents = doc.sentences[lo:sent.index]
    else:
        prev_sents = ()
    prev_tokens = tuple(t for s in prev_sents for t in s.tokens)
    return _assemble(mention, sent.tokens, prev_tokens, overlap, config, mention.label)


def truncate_pseudo(ps: PseudoSentence, max_tokens: int) -> PseudoSentence:
    """Drop tokens from the end of the context region until within budget.

    [CLS], overlap markers, both [SEP]s and the mention tokens are never
    touched; if they alone exceed the budget this raises BudgetError.
    """
    if len(ps.tokens) <= max_tokens:
        return ps
    overflow = len(ps.tokens) - max_tokens
    start, end = ps.context_span
    if overflow > end - start:
        raise BudgetError(
            f"mention and special tokens alone exceed the budget of {max_tokens} "
            f"for mention {ps.mention_id!r}"
        )
    cut_lo, cut_hi = end - overflow, end
    tokens = ps.tokens[:cut_lo] + ps.tokens[cut_hi:]
    segment_ids = ps.segment_ids[:cut_lo] + ps.segment_ids[cut_hi:]
    return replace(ps, tokens=tokens, segment_ids=segment_ids, context_span=(start, cut_lo))


def drop_last_context_word(ps: PseudoSentence) -> PseudoSentence:
    """Remove one word from the context end (used when subwords overflow)."""
    start, end = ps.context_span
    if end <= start:
        raise BudgetError(
            f"mention and special tokens alone exceed the subword budget "
            f"for mention {ps.mention_id!r}"
        )
    return truncate_pseudo(ps, len(ps.tokens) - 1)


def window_previous_context(
    doc: Document, mention: Mention, stride: int, max_tokens: int,
    config: ContextConfig | None = None,
) -> list[PseudoSentence]:
    """Sliding windows over all previous-sentence tokens, one input each.

    Every window shares the local sentence + mention framing; window width is
    whatever the budget leaves after the fixed parts.  With no previous
    context (or no spare budget) exactly one input is returned.
    """
    if stride <= 0:
        raise ConfigError(f"stride must be positive, got {stride}")
    base = config or ContextConfig()
    base = replace(base, all_previous_context=False, extra_prev_sentences=0,
                   max_tokens=max_tokens)
    base.validate()
    sent = _locate(mention, doc)
    overlap = compute_overlap(mention, doc) if base.include_overlap else None
    prev_tokens = tuple(t for s in doc.sentences[:sent.index] for t in s.tokens)

    fixed = _assemble(mention, sent.tokens, (), overlap, base, mention.label)
    capacity = max_tokens - len(fixed.tokens)
    if not prev_tokens or capacity <= 0:
        return [fixed]

    windows = []
    pos = 0
    while True:
        chunk = prev_tokens[pos:pos + capacity]
        windows.append(_assemble(mention, sent.tokens, chunk, overlap, base, mention.label))
        if pos + capacity >= len(prev_tokens):
            break
        pos += stride
    return windows


def build_instances(docs, config: ContextConfig) -> list[PseudoSentence]:
    """Pseudo sentences for every mention of every document, in corpus order.

    With all_previous_context enabled each mention expands into its sliding
    windows (same mention_id), otherwise one input per mention.
    """
    instances: list[PseudoSentence] = []
    for doc in docs:
        for sent in doc.sentences:
            for mention in sent.mentions:
                if config.all_previous_context:
                    instances.extend(
                        window_previous_context(
                            doc, mention, config.sliding_window_stride,
                            config.max_tokens, config=config,
                        )
                    )
                else:
                    instances.append(build_pseudo_sentence(mention, doc, config))
    return instances
