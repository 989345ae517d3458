"""Synthetic learner corpora and simulated decoder n-best lists.

A template grammar over a closed vocabulary produces grammatical sentences;
an :class:`ErrorModel` corrupts some of them and records gold edits back to
the clean form; a :class:`SimulatedCorrector` stands in for an SMT decoder,
proposing true fixes, wrong fixes and noise edits with log-linear decoder
features and ranking every non-overlapping combination of them.

Every random choice goes through ``random.Random`` instances seeded from
explicit integers or strings, so output is identical across platforms.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

from ._lexicon import IRREGULAR_VERBS, NOUNS, _regular_forms
from .align import extract_edits, spans_overlap
from .corpus import AnnotatedSentence, GoldEdit, NBestEntry, NBestList, Sentence

ERROR_TYPES = ("SVA", "Vform", "ArtOrDet", "Prep", "Nn")

# ---------------------------------------------------------------------------
# vocabulary

SUBJECT_NOUNS = "cat dog teacher student bird farmer doctor boy girl friend man woman child baby horse".split()
OBJECT_NOUNS = "apple book ball letter car house box chair window door horse bowl package glass".split()
PLACE_NOUNS = "park garden house school kitchen room village city river road shop".split()
ADJECTIVES = "big small old young happy red hungry tired quiet new".split()
TRANSITIVE = "eat like see find chase visit open watch carry love buy clean paint kick push pull want help".split()
# intransitive verb -> preposition it takes
PREP_VERBS = {
    "wait": "for", "look": "at", "listen": "to", "live": "in", "walk": "to",
    "sit": "on", "play": "with", "run": "to", "stay": "at", "work": "in",
}
LOCATIVE_PREPS = ("in", "near", "behind")
ALL_PREPS = ("in", "on", "at", "for", "to", "with", "near", "behind", "of", "from")
MODALS = ("can", "will", "must", "should")
SG_DETS = ("the", "the", "the", "a", "this", "my", "his", "her", "our", "their", "every")
PL_DETS = ("the", "the", "these", "those", "some", "my", "our", "their")

PLURAL = dict(NOUNS)
SINGULAR = {p: s for s, p in NOUNS.items()}


def verb_forms(base: str) -> Dict[str, str]:
    regular = _regular_forms(base)
    irregular = IRREGULAR_VERBS.get(base, (None,) * 4)
    third, past, participle, ing = (f or r for f, r in zip(irregular, regular))
    return {"base": base, "3sg": third, "past": past, "pp": participle, "ing": ing}


_FORM_INDEX: Dict[str, Tuple[str, str]] = {}
for _base in sorted(set(TRANSITIVE) | set(PREP_VERBS)):
    for _kind, _form in verb_forms(_base).items():
        _FORM_INDEX.setdefault(_form, (_base, _kind))


def _article(next_word: str) -> str:
    return "an" if next_word[0] in "aeiou" else "a"


# ---------------------------------------------------------------------------
# grammar


@dataclass(frozen=True)
class Slot:
    """One generated token and its grammatical role."""

    token: str
    role: str  # det, adj, noun, verb, aux, modal, prep, cc, punct
    number: str = ""  # "sg" / "pl" for nouns and finite verbs
    kind: str = ""  # verb form kind, or "obj" for object nouns


def _vocab(items: Sequence[str], size: int) -> Tuple[str, ...]:
    return tuple(items[:max(1, size)])


class Grammar:
    """Template grammar; ``size`` caps each open word class."""

    def __init__(self, size: int = 12):
        if size < 1:
            raise ValueError("grammar size must be >= 1")
        self.subjects = _vocab(SUBJECT_NOUNS, size)
        self.objects = _vocab(OBJECT_NOUNS, size)
        self.places = _vocab(PLACE_NOUNS, size)
        self.adjectives = _vocab(ADJECTIVES, size)
        self.transitive = _vocab(TRANSITIVE, size)
        self.prep_verbs = _vocab(list(PREP_VERBS), size)

    def np(self, rng: random.Random, nouns: Sequence[str], kind: str = "") -> List[Slot]:
        noun = rng.choice(nouns)
        number = "pl" if rng.random() < 0.35 else "sg"
        word = PLURAL[noun] if number == "pl" else noun
        adj = rng.choice(self.adjectives) if rng.random() < 0.3 else None
        det = rng.choice(PL_DETS if number == "pl" else SG_DETS)
        if det == "a":
            det = _article(adj or word)
        out = [Slot(det, "det", number)]
        if adj:
            out.append(Slot(adj, "adj"))
        out.append(Slot(word, "noun", number, kind))
        return out

    def finite(self, base: str, number: str) -> Slot:
        form = verb_forms(base)["3sg" if number == "sg" else "base"]
        return Slot(form, "verb", number, "3sg" if number == "sg" else "base")

    def sentence(self, rng: random.Random) -> List[Slot]:
        template = rng.choices(("svo", "svp", "spvo", "coord", "modal", "perfect"), (3, 3, 2, 1, 2, 1))[0]
        subj = self.np(rng, self.subjects)
        number = subj[-1].number
        out = list(subj)
        if template == "spvo":
            out.append(Slot(rng.choice(LOCATIVE_PREPS), "prep"))
            out += self.np(rng, self.places)
        if template in ("svo", "spvo", "coord"):
            out.append(self.finite(rng.choice(self.transitive), number))
            out += self.np(rng, self.objects, "obj")
            if template == "coord":
                out.append(Slot("and", "cc"))
                out.append(self.finite(rng.choice(self.transitive), number))
                out += self.np(rng, self.objects, "obj")
        elif template == "svp":
            verb = rng.choice(self.prep_verbs)
            out.append(self.finite(verb, number))
            out.append(Slot(PREP_VERBS[verb], "prep"))
            out += self.np(rng, self.places)
        elif template == "modal":
            out.append(Slot(rng.choice(MODALS), "modal"))
            base = rng.choice(self.transitive)
            out.append(Slot(base, "verb", "", "after_modal"))
            out += self.np(rng, self.objects, "obj")
        else:
            out.append(Slot("has" if number == "sg" else "have", "aux", number))
            form = verb_forms(rng.choice(self.transitive))["pp"]
            out.append(Slot(form, "verb", "", "after_have"))
            out += self.np(rng, self.objects, "obj")
        if template == "svo" and rng.random() < 0.4:
            out.append(Slot(rng.choice(LOCATIVE_PREPS), "prep"))
            out += self.np(rng, self.places)
        out.append(Slot(".", "punct"))
        return out


# ---------------------------------------------------------------------------
# corruptions


def _alternatives(error_type: str, slots: Sequence[Slot], i: int) -> List[Tuple[str, ...]]:
    """Erroneous replacements for ``slots[i]`` under ``error_type`` (empty if
    the slot is not a trigger); each is a token tuple, () meaning deletion."""
    s = slots[i]
    if error_type == "SVA":
        if s.role == "verb" and s.kind in ("3sg", "base"):
            base, _ = _FORM_INDEX[s.token]
            return [(verb_forms(base)["base" if s.kind == "3sg" else "3sg"],)]
        if s.role == "aux":
            return [("have" if s.token == "has" else "has",)]
        return []
    if error_type == "Vform":
        if s.role == "verb" and s.kind == "after_modal":
            f = verb_forms(s.token)
            return [(f["3sg"],), (f["past"],), (f["ing"],)]
        if s.role == "verb" and s.kind == "after_have":
            base, _ = _FORM_INDEX[s.token]
            f = verb_forms(base)
            return [(f[k],) for k in ("base", "ing", "past") if f[k] != s.token]
        return []
    if error_type == "ArtOrDet":
        if s.role == "det" and s.token in ("the", "a", "an"):
            swap = ("the",) if s.token != "the" else ((_article(slots[i + 1].token),) if s.number == "sg" else ())
            return [()] + ([swap] if swap else [])
        return []
    if error_type == "Prep":
        if s.role == "prep":
            return [(p,) for p in ALL_PREPS if p != s.token]
        return []
    if error_type == "Nn":
        if s.role == "noun" and s.kind == "obj" and i > 0 and slots[i - 1].token in ("the", "my", "his", "her", "our", "their"):
            other = PLURAL.get(s.token) or SINGULAR.get(s.token)
            return [(other,)] if other else []
        return []
    raise ValueError(f"unknown error type {error_type!r}")


# learners' typical preposition confusions, favoured by the error model
LEARNER_PREPS = {
    "in": "on", "on": "in", "at": "in", "to": "for", "for": "to",
    "with": "to", "near": "to", "behind": "in",
}


def _learner_choice(rng: random.Random, error_type: str, token: str, options: List[Tuple[str, ...]]):
    """Pick a corruption the way learners err: articles are mostly dropped,
    prepositions mostly swapped for their usual confusion."""
    if error_type == "ArtOrDet":
        weights = [3.0 if opt == () else 1.0 for opt in options]
    elif error_type == "Prep":
        weights = [6.0 if opt == (LEARNER_PREPS.get(token),) else 1.0 for opt in options]
    else:
        weights = [1.0] * len(options)
    return rng.choices(options, weights)[0]


@dataclass(frozen=True)
class ErrorRule:
    error_type: str
    probability: float

    def __post_init__(self):
        if self.error_type not in ERROR_TYPES:
            raise ValueError(f"unknown error type {self.error_type!r}")
        if not 0.0 <= self.probability <= 1.0:
            raise ValueError("rule probability must lie in [0, 1]")


DEFAULT_RULES = (
    ErrorRule("SVA", 0.3),
    ErrorRule("Vform", 0.3),
    ErrorRule("ArtOrDet", 0.35),
    ErrorRule("Prep", 0.25),
    ErrorRule("Nn", 0.25),
)


@dataclass(frozen=True)
class ErrorModel:
    """Each rule fires at most once per sentence, at a uniformly chosen
    trigger site, with its probability; corrupted sites are never adjacent."""

    rules: Tuple[ErrorRule, ...] = DEFAULT_RULES
    seed: int = 0


def _corrupt(slots: List[Slot], em: ErrorModel, rng: random.Random):
    """Corrupted tokens plus the gold edits (on the corrupted sentence) that restore it."""
    clean = tuple(s.token for s in slots)
    taken: List[int] = []
    plan: Dict[int, Tuple[Tuple[str, ...], str]] = {}
    for rule in em.rules:
        if rng.random() >= rule.probability:
            continue
        sites = [
            i for i in range(len(slots))
            if _alternatives(rule.error_type, slots, i) and all(abs(i - t) > 1 for t in taken)
        ]
        if not sites:
            continue
        i = rng.choice(sites)
        corruption = _learner_choice(rng, rule.error_type, slots[i].token, _alternatives(rule.error_type, slots, i))
        plan[i] = (corruption, rule.error_type)
        taken.append(i)
    corrupted = []
    for i, tok in enumerate(clean):
        corrupted.extend(plan[i][0] if i in plan else (tok,))
    corrupted = tuple(corrupted)
    edits = extract_edits(corrupted, clean)
    types = [plan[i][1] for i in sorted(plan)]
    if len(edits) != len(types):
        # alignment merged or split a corruption; keep the sentence clean
        return clean, ()
    gold = tuple(GoldEdit(e.start, e.end, e.replacement, t) for e, t in zip(edits, types))
    return corrupted, gold


def generate_corpus(grammar_size: int, sentence_count: int, em: ErrorModel):
    """(annotated corrupted sentences, clean sentences), deterministic in ``em.seed``."""
    if sentence_count < 1:
        raise ValueError("sentence count must be >= 1")
    grammar = Grammar(grammar_size)
    rng = random.Random(em.seed)
    dataset: List[AnnotatedSentence] = []
    clean: List[Sentence] = []
    for _ in range(sentence_count):
        slots = grammar.sentence(rng)
        source, gold = _corrupt(slots, em, rng)
        dataset.append(AnnotatedSentence.build(source, {0: gold}))
        clean.append(tuple(s.token for s in slots))
    return dataset, clean


# ---------------------------------------------------------------------------
# simulated decoder

DECODER_WEIGHTS = (("tm", 1.0), ("lm", 0.5), ("wp", -0.1))

DEFAULT_FIX_PROBABILITY = {"SVA": 0.7, "Vform": 0.6, "ArtOrDet": 0.6, "Prep": 0.5, "Nn": 0.6}

# noise confusion table, in the order tried
NOISE_TYPES = ("ArtOrDet", "Prep", "SVA", "Nn")


@dataclass(frozen=True)
class SimulatedCorrector:
    """Decoder stand-in.

    Each gold edit is proposed as a fix with its type's ``fix_probability``;
    a proposed fix gets a negative decoder score with ``hidden_fix_rate``,
    so it can only surface below rank 1. ``wrong_fix_rate`` proposes a
    different replacement at a gold span and ``noise_rate`` is the chance of
    each of ``noise_tries`` spurious confusion-table edits elsewhere.
    """

    fix_probability: Mapping[str, float] = field(default_factory=lambda: dict(DEFAULT_FIX_PROBABILITY))
    hidden_fix_rate: float = 0.3
    wrong_fix_rate: float = 0.3
    noise_rate: float = 0.5
    noise_tries: int = 4
    n: int = 5
    seed: int = 0
    max_candidates: int = 8

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be >= 1")
        for name in ("hidden_fix_rate", "wrong_fix_rate", "noise_rate"):
            if not 0.0 <= getattr(self, name) <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1]")


@dataclass(frozen=True)
class _Candidate:
    start: int
    end: int
    replacement: Tuple[str, ...]
    tm: float
    lm: float


def _source_slots(source: Sentence) -> List[Slot]:
    """Recover roles for noise generation from the surface tokens."""
    slots = []
    for i, tok in enumerate(source):
        if tok in ("the", "a", "an"):
            nxt = source[i + 1] if i + 1 < len(source) else ""
            slots.append(Slot(tok, "det", "pl" if nxt in SINGULAR else "sg"))
        elif tok in ALL_PREPS:
            slots.append(Slot(tok, "prep"))
        elif tok in _FORM_INDEX and _FORM_INDEX[tok][1] in ("3sg", "base") and i > 0 and source[i - 1] not in MODALS:
            slots.append(Slot(tok, "verb", "", _FORM_INDEX[tok][1]))
        elif tok in PLURAL or tok in SINGULAR:
            slots.append(Slot(tok, "noun", "", "obj"))
        else:
            slots.append(Slot(tok, "other"))
    return slots


def _local(rng: random.Random, valid: bool, quality: float, length_change: int) -> Tuple[float, float]:
    """(tm, lm) contributions such that, with the word-penalty change the
    edit causes, the edit shifts the decoder score by ``quality``."""
    (_, w_tm), (_, w_lm), (_, w_wp) = DECODER_WEIGHTS
    lm = rng.gauss(0.2 if valid else -0.2, 1.0)
    tm = (quality - w_lm * lm + w_wp * length_change) / w_tm
    return tm, lm


def _candidates(source: Sentence, gold: Sequence[GoldEdit], sc: SimulatedCorrector,
                rng: random.Random) -> List[_Candidate]:
    out: Dict[tuple, _Candidate] = {}

    def add(start, end, replacement, valid, quality):
        key = (start, end, tuple(replacement))
        if tuple(source[start:end]) == key[2] or key in out:
            return
        tm, lm = _local(rng, valid, quality, len(replacement) - (end - start))
        out[key] = _Candidate(start, end, key[2], tm, lm)

    for g in gold:
        if rng.random() < sc.fix_probability.get(g.error_type, 0.0):
            if rng.random() < sc.hidden_fix_rate:
                quality = -rng.uniform(0.05, 0.8)
            else:
                quality = max(0.1, rng.gauss(1.0, 0.6))
            add(g.start, g.end, g.replacement, True, quality)
        if rng.random() < sc.wrong_fix_rate:
            wrong = _wrong_fix(source, g, rng)
            if wrong is not None:
                add(g.start, g.end, wrong, False, rng.gauss(-0.3, 0.6))
    slots = _source_slots(source)
    gold_keys = {g.key for g in gold}
    for _ in range(sc.noise_tries):
        if rng.random() >= sc.noise_rate:
            continue
        error_type = rng.choice(NOISE_TYPES)
        sites = [i for i in range(len(slots) - 1) if _alternatives(error_type, slots, i)]
        if not sites:
            continue
        i = rng.choice(sites)
        replacement = rng.choice(_alternatives(error_type, slots, i))
        if (i, i + 1, replacement) in gold_keys:
            continue
        add(i, i + 1, replacement, False, rng.gauss(-0.6, 0.6))
    return list(out.values())[:sc.max_candidates]


def _wrong_fix(source: Sentence, g: GoldEdit, rng: random.Random) -> Optional[Tuple[str, ...]]:
    target = g.replacement
    if len(target) == 1 and target[0] in _FORM_INDEX:
        base, _ = _FORM_INDEX[target[0]]
        options = [f for f in verb_forms(base).values() if f != target[0] and (f,) != tuple(source[g.start:g.end])]
    elif len(target) == 1 and target[0] in ALL_PREPS:
        options = [p for p in ALL_PREPS if p != target[0] and (p,) != tuple(source[g.start:g.end])]
    elif len(target) == 1 and target[0] in ("the", "a", "an"):
        options = [d for d in ("the", "a", "this") if d != target[0] and (d,) != tuple(source[g.start:g.end])]
    else:
        return None
    options = sorted(set(options))
    return (rng.choice(options),) if options else None


def _apply(source: Sentence, chosen: Sequence[_Candidate]) -> Sentence:
    out = list(source)
    for c in sorted(chosen, key=lambda c: (c.start, c.end), reverse=True):
        out[c.start:c.end] = c.replacement
    return tuple(out)


def simulate_nbest(source: Sequence[str], gold: Sequence[GoldEdit], sc: SimulatedCorrector,
                   source_id: int = 0) -> NBestList:
    """Rank every non-overlapping subset of the proposed edits by the
    decoder's linear score and keep the best ``sc.n`` distinct hypotheses."""
    source = tuple(source)
    rng = random.Random(f"{sc.seed}:{source_id}:{' '.join(source)}")
    cands = _candidates(source, gold, sc, rng)
    base_lm = round(-2.0 * (len(source) + 1), 4)
    best: Dict[Sentence, Tuple[float, Dict[str, float]]] = {}
    for size in range(len(cands) + 1):
        for subset in itertools.combinations(cands, size):
            if any(spans_overlap(a.start, a.end, b.start, b.end) for a, b in itertools.combinations(subset, 2)):
                continue
            hyp = _apply(source, subset)
            feats = {
                "tm": round(float(sum(c.tm for c in subset)), 4),
                "lm": round(base_lm + sum(c.lm for c in subset), 4),
                "wp": float(-len(hyp)),
            }
            score = 0.0
            for i, (name, w) in enumerate(DECODER_WEIGHTS):
                score = feats[name] * w if i == 0 else score + feats[name] * w
            if hyp not in best or score > best[hyp][0]:
                best[hyp] = (score, feats)
    ranked = sorted(best.items(), key=lambda kv: (-kv[1][0], kv[0]))[:sc.n]
    entries = tuple(
        NBestEntry(rank, hyp, feats, score) for rank, (hyp, (score, feats)) in enumerate(ranked, start=1)
    )
    return NBestList(source_id, source, entries)


def simulate_lists(dataset: Sequence[AnnotatedSentence], sc: SimulatedCorrector) -> List[NBestList]:
    return [simulate_nbest(s.source, s.gold(0), sc, i) for i, s in enumerate(dataset)]
