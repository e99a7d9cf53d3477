"""Annotated-discourse data model, corpus I/O, statistics and fold splitting.

A corpus file is UTF-8 JSON-lines.  The first line is a header record::

    {"scheme_name": "isnotes", "labels": ["old", ..., "new"]}

and every following line is one document record::

    {"doc_id": "d0",
     "sentences": [{"tokens": ["Friends", "pitched", "in", "."],
                    "mentions": [{"mention_id": "d0_s0_m0", "start": 0,
                                  "end": 1, "head": 0, "is_pronoun": false,
                                  "label": "m/bridging"}]}]}

``head`` and ``is_pronoun`` may be omitted; :func:`default_head_index` and
the closed pronoun list fill them in.  A file is rejected on the first
violation, reporting the line number and reason.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import ConfigError, InvariantError, SchemaError

ISNOTES_LABELS = (
    "old",
    "m/worldKnowledge",
    "m/syntactic",
    "m/aggregate",
    "m/function",
    "m/comparative",
    "m/bridging",
    "new",
)

# Closed list of English personal / possessive / demonstrative pronouns,
# used when a record omits the is_pronoun flag.
PRONOUNS = frozenset(
    """i me my mine myself you your yours yourself he him his himself she her
    hers herself it its itself we us our ours ourselves they them their theirs
    themselves this that these those one ones""".split()
)

# Tokens that end the span considered by the head heuristic.
_HEAD_STOP = frozenset({"of", "in", "that", "which", "who", "whom", "whose"})

# Reserved by the pseudo-sentence framing; corpus text may not contain them.
RESERVED_TOKENS = ("[PAD]", "[UNK]", "[CLS]", "[SEP]")


@dataclass(frozen=True)
class LabelScheme:
    """An ordered, unique set of information-status labels."""

    name: str
    labels: tuple[str, ...]

    def __post_init__(self) -> None:
        if not self.labels:
            raise InvariantError("label scheme must have at least one label")
        if len(set(self.labels)) != len(self.labels):
            raise InvariantError("label scheme contains duplicate labels")

    def index_of(self, label: str) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise InvariantError(f"unknown label {label!r} for scheme {self.name!r}") from None

    def __len__(self) -> int:
        return len(self.labels)


ISNOTES_SCHEME = LabelScheme("isnotes", ISNOTES_LABELS)


@dataclass(frozen=True)
class Mention:
    mention_id: str
    start: int
    end: int
    head: int
    is_pronoun: bool
    label: str


@dataclass(frozen=True)
class Sentence:
    index: int
    tokens: tuple[str, ...]
    mentions: tuple[Mention, ...]


@dataclass(frozen=True)
class Document:
    doc_id: str
    sentences: tuple[Sentence, ...]

    def mentions(self):
        for sent in self.sentences:
            for mention in sent.mentions:
                yield sent, mention


@dataclass(frozen=True)
class Corpus:
    scheme: LabelScheme
    documents: tuple[Document, ...]

    def total_mentions(self) -> int:
        return sum(len(s.mentions) for d in self.documents for s in d.sentences)


def default_head_index(tokens: tuple[str, ...] | list[str]) -> int:
    """Heuristic head: last alphabetic token before any of/in/relative marker."""
    cut = len(tokens)
    for i, tok in enumerate(tokens):
        if tok.lower() in _HEAD_STOP:
            cut = i
            break
    for i in range(cut - 1, -1, -1):
        if tokens[i].isalpha():
            return i
    return len(tokens) - 1


def is_closed_class_pronoun(token: str) -> bool:
    return token.lower() in PRONOUNS


def _validate_document(doc: Document, scheme: LabelScheme) -> None:
    """Raise InvariantError on the first mention/sentence invariant violation."""
    seen_ids: set[str] = set()
    for i, sent in enumerate(doc.sentences):
        if sent.index != i:
            raise InvariantError(f"doc {doc.doc_id!r}: sentence index {sent.index} at position {i}")
        n = len(sent.tokens)
        spans: set[tuple[int, int]] = set()
        for m in sent.mentions:
            where = f"mention {m.mention_id!r} in doc {doc.doc_id!r}"
            if m.mention_id in seen_ids:
                raise InvariantError(f"{where}: duplicate mention_id")
            seen_ids.add(m.mention_id)
            if not (0 <= m.start < m.end <= n):
                raise InvariantError(f"{where}: span [{m.start}, {m.end}) outside [0, {n})")
            if not (m.start <= m.head < m.end):
                raise InvariantError(f"{where}: head {m.head} outside span [{m.start}, {m.end})")
            if (m.start, m.end) in spans:
                raise InvariantError(f"{where}: duplicate span ({m.start}, {m.end})")
            spans.add((m.start, m.end))
            if m.label not in scheme.labels:
                raise InvariantError(f"{where}: unknown label {m.label!r}")


def validate_corpus(corpus: Corpus) -> None:
    seen_docs: set[str] = set()
    for doc in corpus.documents:
        if doc.doc_id in seen_docs:
            raise InvariantError(f"duplicate doc_id {doc.doc_id!r}")
        seen_docs.add(doc.doc_id)
        _validate_document(doc, corpus.scheme)


def _need(record: dict, field: str, kind: type, where: str):
    if field not in record:
        raise SchemaError(f"{where}: missing field {field!r}")
    value = record[field]
    if kind is bool and not isinstance(value, bool):
        raise SchemaError(f"{where}: field {field!r} must be a boolean")
    if kind is int and (isinstance(value, bool) or not isinstance(value, int)):
        raise SchemaError(f"{where}: field {field!r} must be an integer")
    if kind is str and not isinstance(value, str):
        raise SchemaError(f"{where}: field {field!r} must be a string")
    if kind is list and not isinstance(value, list):
        raise SchemaError(f"{where}: field {field!r} must be a list")
    return value


def _parse_mention(rec: dict, tokens: tuple[str, ...], where: str) -> Mention:
    mention_id = _need(rec, "mention_id", str, where)
    start = _need(rec, "start", int, where)
    end = _need(rec, "end", int, where)
    span = tuple(tokens[max(start, 0):max(end, 0)])
    if "head" in rec:
        head = _need(rec, "head", int, where)
    else:
        head = start + default_head_index(span) if span else start
    if "is_pronoun" in rec:
        is_pronoun = _need(rec, "is_pronoun", bool, where)
    else:
        is_pronoun = len(span) == 1 and is_closed_class_pronoun(span[0])
    label = _need(rec, "label", str, where)
    return Mention(mention_id, start, end, head, is_pronoun, label)


def _parse_document(rec: dict, where: str) -> Document:
    doc_id = _need(rec, "doc_id", str, where)
    sentences = []
    for i, sent_rec in enumerate(_need(rec, "sentences", list, where)):
        swhere = f"{where}, sentence {i}"
        if not isinstance(sent_rec, dict):
            raise SchemaError(f"{swhere}: sentence record must be an object")
        raw_tokens = _need(sent_rec, "tokens", list, swhere)
        for tok in raw_tokens:
            if not isinstance(tok, str) or not tok or any(c.isspace() for c in tok):
                raise SchemaError(f"{swhere}: tokens must be non-empty strings without whitespace")
            if tok in RESERVED_TOKENS or tok.startswith("pre_overlap"):
                raise SchemaError(f"{swhere}: token {tok!r} is reserved")
        tokens = tuple(raw_tokens)
        mentions = tuple(
            _parse_mention(m, tokens, swhere)
            for m in _need(sent_rec, "mentions", list, swhere)
        )
        sentences.append(Sentence(i, tokens, mentions))
    return Document(doc_id, tuple(sentences))


def load_corpus(path: str | Path) -> Corpus:
    """Load and validate a JSON-lines corpus file.

    Raises OSError for unreadable paths, SchemaError for malformed records
    and InvariantError for domain violations, each naming the file line.
    An empty file yields an empty corpus under the default ISNotes scheme.
    """
    path = Path(path)
    with open(path, encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    lines = [ln for ln in lines if ln.strip()]
    if not lines:
        return Corpus(ISNOTES_SCHEME, ())

    def parse_json(line: str, lineno: int) -> dict:
        try:
            rec = json.loads(line)
        except json.JSONDecodeError as exc:
            raise SchemaError(f"line {lineno}: invalid JSON ({exc.msg})") from None
        if not isinstance(rec, dict):
            raise SchemaError(f"line {lineno}: record must be a JSON object")
        return rec

    header = parse_json(lines[0], 1)
    name = _need(header, "scheme_name", str, "line 1")
    labels = _need(header, "labels", list, "line 1")
    if not all(isinstance(lb, str) for lb in labels):
        raise SchemaError("line 1: labels must be strings")
    try:
        scheme = LabelScheme(name, tuple(labels))
    except InvariantError as exc:
        raise InvariantError(f"line 1: {exc}") from None

    documents = []
    for lineno, line in enumerate(lines[1:], start=2):
        rec = parse_json(line, lineno)
        doc = _parse_document(rec, f"line {lineno}")
        try:
            _validate_document(doc, scheme)
        except InvariantError as exc:
            raise InvariantError(f"line {lineno}: {exc}") from None
        documents.append(doc)

    corpus = Corpus(scheme, tuple(documents))
    validate_corpus(corpus)
    return corpus


def save_corpus(corpus: Corpus, path: str | Path) -> None:
    """Write a corpus in the JSON-lines format read by :func:`load_corpus`."""
    def dump(obj) -> str:
        return json.dumps(obj, ensure_ascii=False)

    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dump({"scheme_name": corpus.scheme.name,
                       "labels": list(corpus.scheme.labels)}) + "\n")
        for doc in corpus.documents:
            rec = {
                "doc_id": doc.doc_id,
                "sentences": [
                    {
                        "tokens": list(s.tokens),
                        "mentions": [
                            {
                                "mention_id": m.mention_id,
                                "start": m.start,
                                "end": m.end,
                                "head": m.head,
                                "is_pronoun": m.is_pronoun,
                                "label": m.label,
                            }
                            for m in s.mentions
                        ],
                    }
                    for s in doc.sentences
                ],
            }
            fh.write(dump(rec) + "\n")


@dataclass(frozen=True)
class CorpusStats:
    total: int
    counts: dict[str, int]
    percentages: dict[str, float]


def corpus_stats(corpus: Corpus) -> CorpusStats:
    """Per-label mention counts and percentages (0 when the corpus is empty)."""
    counts = {label: 0 for label in corpus.scheme.labels}
    for doc in corpus.documents:
        for _, mention in doc.mentions():
            counts[mention.label] += 1
    total = sum(counts.values())
    if total == 0:
        pct = {label: 0.0 for label in counts}
    else:
        pct = {label: 100.0 * c / total for label, c in counts.items()}
    return CorpusStats(total, counts, pct)


def format_stats(stats: CorpusStats) -> str:
    width = max(len(label) for label in stats.counts)
    lines = [f"{'mentions':<{width}}  {stats.total:>7}"]
    for label, count in stats.counts.items():
        lines.append(f"{label:<{width}}  {count:>7}  {stats.percentages[label]:5.1f}%")
    return "\n".join(lines)


def split_kfold(corpus: Corpus, k: int, seed: int) -> list[tuple[tuple[str, ...], tuple[str, ...]]]:
    """Split document ids into k folds: shuffle with the seed, deal round-robin.

    Returns (train_doc_ids, test_doc_ids) pairs; both sides keep corpus order.
    """
    doc_ids = [d.doc_id for d in corpus.documents]
    if k < 2:
        raise ConfigError(f"k must be at least 2, got {k}")
    if k > len(doc_ids):
        raise ConfigError(f"k={k} exceeds the {len(doc_ids)} documents available")
    order = np.random.default_rng(seed).permutation(len(doc_ids))
    folds = []
    for i in range(k):
        test = {doc_ids[j] for j in order[i::k]}
        train_ids = tuple(d for d in doc_ids if d not in test)
        test_ids = tuple(d for d in doc_ids if d in test)
        folds.append((train_ids, test_ids))
    return folds


def subcorpus(corpus: Corpus, doc_ids) -> Corpus:
    """A corpus restricted to the given doc ids, keeping corpus order."""
    wanted = set(doc_ids)
    return Corpus(corpus.scheme, tuple(d for d in corpus.documents if d.doc_id in wanted))
