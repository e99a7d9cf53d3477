"""Rule-labeled synthetic discourse corpora for desk-scale experiments.

Each generated sentence carries exactly one labeled mention whose label is
fully determined by the surface form and the preceding discourse state:

  * pronoun, or an NP exactly repeating an earlier mention span -> old
  * gazetteer proper name on first mention -> m/worldKnowledge
  * possessive-pronoun NP or "the Y of X" with X previously mentioned -> m/syntactic
  * "X and Y" where X is a previously mentioned entity -> m/aggregate
  * number right after a rise/fall verb -> m/function
  * other/another/more/further + noun -> m/comparative
  * definite or bare relational noun after its trigger entity -> m/bridging
  * "a/an + noun" on first mention -> new

:func:`derive_label` replays these rules from the text alone; the generator
asserts every emitted mention against it, so gold labels are learnable from
the mention, its local sentence, and the previous-mention overlap features.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from .corpus import ISNOTES_SCHEME, Corpus, Document, Mention, Sentence
from .errors import ConfigError, InvariantError

GAZETTEER = (
    "Poland", "Canada", "France", "Brazil", "Japan", "Kenya", "Norway",
    "Chile", "Austria", "Egypt", "Peru", "Vietnam", "Warsaw", "Chicago",
    "Boston", "Madrid", "Oslo", "Lima", "Geneva", "Dublin", "Prague",
    "Seoul", "Nairobi", "Quito", "Havana", "Manila", "Zurich", "Vienna",
    "Francis", "Marie", "Novak", "Chen", "Garcia", "Dubois", "Tanaka",
    "Okafor",
)

# Trigger entity -> relational nouns it licenses as bridging anaphors.
TRIGGER_MAP = {
    "house": ("door", "roof", "garden"),
    "car": ("engine", "price"),
    "shop": ("owner", "shelves"),
    "factory": ("workers", "machines"),
    "book": ("author", "cover"),
    "meeting": ("agenda", "reason"),
    "restaurant": ("menu", "chef"),
    "school": ("principal", "classrooms"),
    "theater": ("stage", "curtain"),
    "harbor": ("docks", "cranes"),
}

# Person pronouns license bare-plural person-relational bridging anaphors
# ("She made money . Friends pitched in .").
PERSON_TRIGGERS = ("she", "he", "they")
PERSON_RELS = ("friends", "colleagues", "relatives", "neighbors")

RELATIONAL_NOUNS = frozenset(
    rel for rels in TRIGGER_MAP.values() for rel in rels
) | frozenset(PERSON_RELS)

# (singular, plural) lemmas for new / comparative mentions; disjoint from
# every other pool so word identity never contradicts the rules.
_PLAIN_LEMMAS = (
    ("law", "laws"), ("treaty", "treaties"), ("budget", "budgets"),
    ("election", "elections"), ("storm", "storms"), ("contract", "contracts"),
    ("report", "reports"), ("survey", "surveys"), ("festival", "festivals"),
    ("debate", "debates"), ("petition", "petitions"), ("strike", "strikes"),
    ("merger", "mergers"), ("lawsuit", "lawsuits"), ("statue", "statues"),
    ("tunnel", "tunnels"), ("recipe", "recipes"),
)
_TRIGGER_LEMMAS = (
    ("house", "houses"), ("car", "cars"), ("shop", "shops"),
    ("factory", "factories"), ("book", "books"), ("meeting", "meetings"),
    ("restaurant", "restaurants"), ("school", "schools"),
    ("theater", "theaters"), ("harbor", "harbors"),
)
NOUN_LEMMAS = _TRIGGER_LEMMAS + _PLAIN_LEMMAS

KINSHIP_NOUNS = (
    "father", "mother", "sister", "brother", "uncle", "partner",
    "assistant", "accountant", "landlord", "tenant",
)
OF_NOUNS = (
    "capital", "border", "history", "center", "mayor", "anthem",
    "currency", "skyline",
)
POSSESSIVE_PRONOUNS = ("their", "her", "his")
PRONOUN_MENTIONS = ("she", "he", "it", "they")

COMPARATIVE_SINGULAR = ("another",)
COMPARATIVE_PLURAL = ("other", "more", "further")
COMPARATIVE_MARKERS = frozenset(COMPARATIVE_SINGULAR) | frozenset(COMPARATIVE_PLURAL)

RISE_FALL_VERBS = ("fell", "rose", "dropped", "climbed", "slipped", "jumped")
NUMBER_TOKENS = ("3", "5", "6", "8", "12", "20", "45", "243")
UNIT_TOKENS = ("%", "cents", "points")
FUNCTION_SUBJECTS = ("sales", "exports", "profits", "revenues", "imports")

# Verb phrases shared across sentence frames so the local context alone
# never identifies a class.
COMMON_VPS = (
    ("pitched", "in"), ("made", "money"), ("arrived", "yesterday"),
    ("smiled",), ("failed",), ("worked", "hard"), ("opened", "early"),
    ("closed", "down"), ("surprised", "everyone"), ("stalled",),
    ("improved", "slowly"), ("vanished",),
)

DEFAULT_MIX: Mapping[str, float] = {
    "old": 0.29,
    "m/worldKnowledge": 0.11,
    "m/syntactic": 0.12,
    "m/aggregate": 0.05,
    "m/function": 0.05,
    "m/comparative": 0.07,
    "m/bridging": 0.11,
    "new": 0.20,
}

# Probability that an old slot is realized as an exact repeat (vs a pronoun)
# when a repeatable entity exists.
_REPEAT_SHARE = 0.6

_VOWELS = frozenset("aeiou")


@dataclass(frozen=True)
class SynthConfig:
    docs: int
    sentences_per_doc: int
    weights: Mapping[str, float] = field(default_factory=lambda: dict(DEFAULT_MIX))


def _indefinite(noun: str) -> str:
    return "an" if noun[0] in _VOWELS else "a"


def _cap(token: str) -> str:
    return token[0].upper() + token[1:]


@dataclass
class _RegEntry:
    span: tuple[str, ...]   # lowercase canonical span, repeatable verbatim
    head_off: int


class _DocState:
    """Per-document discourse state driving feasibility and freshness."""

    def __init__(self, rng: np.random.Generator):
        self.rng = rng
        self.fresh_names = [GAZETTEER[i] for i in rng.permutation(len(GAZETTEER))]
        self.fresh_lemmas = [NOUN_LEMMAS[i] for i in rng.permutation(len(NOUN_LEMMAS))]
        self.fresh_kinship = [KINSHIP_NOUNS[i] for i in rng.permutation(len(KINSHIP_NOUNS))]
        self.fresh_ofnouns = [OF_NOUNS[i] for i in rng.permutation(len(OF_NOUNS))]
        self.registry: list[_RegEntry] = []          # exact-repeat sources
        self.tracked: list[_RegEntry] = []           # definite renderings for X slots
        self.names_seen: list[str] = []              # for "Y of X" and aggregates
        self.trigger_nouns: list[str] = []           # TRIGGER_MAP keys mentioned so far
        self.person_seen = False
        self.rels_used: set[str] = set()
        self._pending: list = []

    def flush(self) -> None:
        for kind, value in self._pending:
            if kind == "registry":
                self.registry.append(value)
            elif kind == "tracked":
                self.tracked.append(value)
            elif kind == "name":
                self.names_seen.append(value)
            elif kind == "trigger":
                self.trigger_nouns.append(value)
            elif kind == "person":
                self.person_seen = True
        self._pending = []

    def defer(self, kind: str, value=None) -> None:
        self._pending.append((kind, value))

    def bridging_options(self) -> list[tuple[str, str]]:
        options = []
        for trig in self.trigger_nouns:
            for rel in TRIGGER_MAP[trig]:
                if rel not in self.rels_used:
                    options.append((trig, rel))
        if self.person_seen:
            for rel in PERSON_RELS:
                if rel not in self.rels_used:
                    options.append(("person", rel))
        return options

    def pick(self, seq):
        return seq[self.rng.integers(len(seq))]


def _feasible(label: str, state: _DocState, first_sentence: bool) -> bool:
    if label == "m/worldKnowledge":
        return bool(state.fresh_names)
    if label == "new":
        return bool(state.fresh_lemmas)
    if label == "m/bridging":
        return not first_sentence and bool(state.bridging_options())
    if label == "m/aggregate":
        return bool(state.tracked) and bool(state.fresh_names)
    if label == "m/comparative":
        return bool(state.fresh_lemmas)
    return True  # old, m/syntactic, m/function


def _realize(label: str, state: _DocState) -> tuple[list[str], int, int, int, bool]:
    """Build one sentence; returns (tokens, start, end, head, is_pronoun)."""
    rng = state.rng
    vp = list(state.pick(COMMON_VPS))

    if label == "old":
        if state.registry and rng.random() < _REPEAT_SHARE:
            entry = state.pick(state.registry)
            span = list(entry.span)
            tokens = span + vp + ["."]
            return tokens, 0, len(span), entry.head_off, False
        pronoun = state.pick(PRONOUN_MENTIONS)
        if pronoun in PERSON_TRIGGERS:
            state.defer("person")
        return [pronoun] + vp + ["."], 0, 1, 0, True

    if label == "m/worldKnowledge":
        name = state.fresh_names.pop()
        state.defer("registry", _RegEntry((name.lower(),), 0))
        state.defer("tracked", _RegEntry((name.lower(),), 0))
        state.defer("name", name.lower())
        return [name] + vp + ["."], 0, 1, 0, False

    if label == "new":
        sing, _ = state.fresh_lemmas.pop()
        art = _indefinite(sing)
        state.defer("tracked", _RegEntry(("the", sing), 1))
        if sing in TRIGGER_MAP:
            state.defer("trigger", sing)
        return [art, sing] + vp + ["."], 0, 2, 1, False

    if label == "m/bridging":
        trig, rel = state.pick(state.bridging_options())
        state.rels_used.add(rel)
        span = [rel] if trig == "person" else ["the", rel]
        state.defer("registry", _RegEntry(tuple(span), len(span) - 1))
        state.defer("tracked", _RegEntry(tuple(span), len(span) - 1))
        tokens = span + vp + ["."]
        return tokens, 0, len(span), len(span) - 1, False

    if label == "m/syntactic":
        if state.names_seen and state.fresh_ofnouns and rng.random() < 0.5:
            noun = state.fresh_ofnouns.pop()
            name = state.pick(state.names_seen)
            span = ["the", noun, "of", _cap(name)]
            return span + vp + ["."], 0, 4, 1, False
        poss = state.pick(POSSESSIVE_PRONOUNS)
        # possessive forms stay m/syntactic on reuse, so exhaustion is safe
        kin = state.fresh_kinship.pop() if state.fresh_kinship else state.pick(KINSHIP_NOUNS)
        return [poss, kin] + vp + ["."], 0, 2, 1, False

    if label == "m/aggregate":
        entry = state.pick(state.tracked)
        name = state.fresh_names.pop()
        state.defer("name", name.lower())
        span = list(entry.span) + ["and", name]
        return span + vp + ["."], 0, len(span), entry.head_off, False

    if label == "m/function":
        subj = _cap(state.pick(FUNCTION_SUBJECTS))
        verb = state.pick(RISE_FALL_VERBS)
        num = state.pick(NUMBER_TOKENS)
        unit = state.pick(UNIT_TOKENS)
        return [subj, verb, num, unit, "."], 2, 4, 3, False

    if label == "m/comparative":
        sing, plur = state.fresh_lemmas.pop()
        if rng.random() < 0.4:
            span = [state.pick(COMPARATIVE_SINGULAR), sing]
        else:
            span = [state.pick(COMPARATIVE_PLURAL), plur]
        return span + vp + ["."], 0, 2, 1, False

    raise ConfigError(f"unknown synthetic class {label!r}")


def _allocate(weights: Mapping[str, float], total: int) -> list[str]:
    """Largest-remainder allocation of class slots, in scheme label order."""
    labels = [lb for lb in ISNOTES_SCHEME.labels if weights.get(lb, 0.0) > 0]
    if not labels:
        raise ConfigError("mixing weights are all zero")
    wsum = sum(weights[lb] for lb in labels)
    exact = [weights[lb] / wsum * total for lb in labels]
    counts = [int(np.floor(x)) for x in exact]
    remainder = total - sum(counts)
    order = sorted(range(len(labels)), key=lambda i: (-(exact[i] - counts[i]), i))
    for i in order[:remainder]:
        counts[i] += 1
    slots: list[str] = []
    for lb, c in zip(labels, counts):
        slots.extend([lb] * c)
    return slots


def gen_synthetic(config: SynthConfig, seed: int) -> Corpus:
    """Generate a deterministic rule-labeled corpus; pure in (config, seed)."""
    if config.docs < 1:
        raise ConfigError(f"docs must be >= 1, got {config.docs}")
    if config.sentences_per_doc < 1:
        raise ConfigError(f"sentences_per_doc must be >= 1, got {config.sentences_per_doc}")
    for label in config.weights:
        if label not in ISNOTES_SCHEME.labels:
            raise ConfigError(f"unknown label in mixing weights: {label!r}")

    rng = np.random.default_rng(seed)
    total = config.docs * config.sentences_per_doc
    slots = _allocate(config.weights, total)
    slots = [slots[i] for i in rng.permutation(total)]

    documents = []
    for d in range(config.docs):
        plan = slots[d * config.sentences_per_doc:(d + 1) * config.sentences_per_doc]
        state = _DocState(rng)
        sentences = []
        for s in range(len(plan)):
            if not _feasible(plan[s], state, first_sentence=s == 0):
                swap = next(
                    (j for j in range(s + 1, len(plan))
                     if _feasible(plan[j], state, first_sentence=s == 0)),
                    None,
                )
                if swap is None:
                    plan[s] = "old"  # pronoun realization is always feasible
                else:
                    plan[s], plan[swap] = plan[swap], plan[s]
            tokens, start, end, head, is_pronoun = _realize(plan[s], state)
            tokens[0] = _cap(tokens[0])
            mention = Mention(f"d{d}_s{s}_m0", start, end, head, is_pronoun, plan[s])
            sentences.append(Sentence(s, tuple(tokens), (mention,)))
            state.flush()
        doc = Document(f"d{d}", tuple(sentences))
        for sent in doc.sentences:
            for mention in sent.mentions:
                derived = derive_label(doc, sent.index, mention)
                if derived != mention.label:
                    raise InvariantError(
                        f"generator bug: {mention.mention_id} labeled "
                        f"{mention.label!r} but rules derive {derived!r}"
                    )
        documents.append(doc)

    return Corpus(ISNOTES_SCHEME, tuple(documents))


def derive_label(doc: Document, sent_index: int, mention: Mention) -> str:
    """Re-derive a mention's label from surface form and earlier mentions."""
    sent = doc.sentences[sent_index]
    span = tuple(t.lower() for t in sent.tokens[mention.start:mention.end])
    head = sent.tokens[mention.head].lower()

    earlier_spans: list[tuple[str, ...]] = []
    earlier_tokens: set[str] = set()
    person_before = False
    for prev in doc.sentences[:sent_index]:
        for m in prev.mentions:
            mspan = tuple(t.lower() for t in prev.tokens[m.start:m.end])
            earlier_spans.append(mspan)
            earlier_tokens.update(mspan)
            if m.is_pronoun and mspan[0] in PERSON_TRIGGERS:
                person_before = True

    if mention.is_pronoun:
        return "old"
    if span[0] in COMPARATIVE_MARKERS:
        return "m/comparative"
    if "and" in span[1:-1]:
        return "m/aggregate"
    if "of" in span or "'s" in span or span[0] in POSSESSIVE_PRONOUNS:
        return "m/syntactic"
    if any(t.isdigit() for t in span) and mention.start > 0 \
            and sent.tokens[mention.start - 1].lower() in RISE_FALL_VERBS:
        return "m/function"
    if span in earlier_spans:
        return "old"
    if len(span) == 1 and span[0].capitalize() in GAZETTEER and span[0] not in earlier_tokens:
        return "m/worldKnowledge"
    if head in RELATIONAL_NOUNS and head not in earlier_tokens \
            and (span[0] == "the" or len(span) == 1):
        if head in PERSON_RELS and person_before:
            return "m/bridging"
        trigger = next((k for k, rels in TRIGGER_MAP.items() if head in rels), None)
        if trigger is not None and trigger in earlier_tokens:
            return "m/bridging"
    if span[0] in ("a", "an") and head not in earlier_tokens:
        return "new"
    raise InvariantError(f"no rule derives a label for mention {mention.mention_id!r}")
