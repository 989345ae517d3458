"""POS tags and NP/VP heads for the feature extractor.

Two providers share one interface: :class:`BuiltinAnnotator`, a lexicon and
suffix-rule tagger with a regular-expression chunker, and
:class:`FileAnnotator`, which serves precomputed parser output keyed by the
sentence text.
"""

from __future__ import annotations

import bisect
from dataclasses import dataclass
from functools import lru_cache
from typing import Dict, Iterable, Optional, Sequence, Tuple

from ._lexicon import build_lexicon

NOUN_TAGS = frozenset({"NN", "NNS", "NNP", "NNPS"})
VERB_TAGS = frozenset({"VB", "VBD", "VBG", "VBN", "VBP", "VBZ"})
DET_TAGS = frozenset({"DT", "PRP$", "CD"})
SUBJECT_TAGS = frozenset({"PRP", "NN", "NNS", "NNP", "NNPS", "WDT", "WP", "EX"})
PERFECT_AUX = frozenset({"has", "have", "had", "having", "is", "are", "was", "were", "be", "been", "am"})

_LEXICON = build_lexicon()


@dataclass(frozen=True)
class TokenAnnotations:
    pos: Tuple[str, ...]
    np_heads: Tuple[int, ...] = ()
    vp_heads: Tuple[int, ...] = ()

    def __post_init__(self):
        n = len(self.pos)
        for h in self.np_heads + self.vp_heads:
            if not 0 <= h < n:
                raise ValueError(f"head index {h} outside a {n}-token sentence")


def nearest_head_left(heads: Sequence[int], edit_start: int) -> Optional[int]:
    """Largest head strictly before ``edit_start``."""
    i = bisect.bisect_left(heads, edit_start)
    return heads[i - 1] if i > 0 else None


def nearest_head_right(heads: Sequence[int], edit_end: int) -> Optional[int]:
    """Smallest head at or after ``edit_end``."""
    i = bisect.bisect_left(heads, edit_end)
    return heads[i] if i < len(heads) else None


# ---------------------------------------------------------------------------
# builtin tagger


def _unknown_tag(word: str, prev_word: Optional[str], prev_tag: Optional[str]) -> str:
    lower = word.lower()
    if any(ch.isdigit() for ch in word):
        return "CD"
    if not any(ch.isalnum() for ch in word):
        return ":"
    if word[0].isupper() and prev_tag is not None:
        return "NNP"
    if lower.endswith("ing") and len(lower) > 4:
        return "VBG"
    if lower.endswith("ed") and len(lower) > 3:
        return "VBN" if prev_word in PERFECT_AUX else "VBD"
    if lower.endswith("ly") and len(lower) > 3:
        return "RB"
    if lower.endswith(("tions", "nesses", "ments", "ities")):
        return "NNS"
    if lower.endswith(("tion", "ness", "ment", "ity", "ance", "ence", "ism")):
        return "NN"
    if lower.endswith("s") and not lower.endswith(("ss", "us", "is")) and len(lower) > 2:
        return "VBZ" if prev_tag in SUBJECT_TAGS else "NNS"
    return "NN"


def _choose(word: str, candidates: Tuple[str, ...], tags: Sequence[str], words: Sequence[str]) -> str:
    prev = tags[-1] if tags else None
    if len(candidates) > 1 and prev in DET_TAGS | {"JJ"}:
        for tag in candidates:
            if tag in NOUN_TAGS:
                return tag
    tag = candidates[0]
    if tag == "VB" and word.lower() not in ("be",):
        if prev in ("MD", "TO") or prev is None:
            return "VB"
        if prev == "RB" and len(tags) > 1 and tags[-2] in VERB_TAGS | {"MD"}:
            return "VB"
        return "VBP"
    if tag == "VBD" and word.lower() not in _AUX_WORDS:
        recent = [w.lower() for w in words[-2:]]
        if any(w in PERFECT_AUX for w in recent):
            return "VBN"
    return tag


def tag(sentence: Sequence[str]) -> Tuple[str, ...]:
    tags = []
    for i, word in enumerate(sentence):
        candidates = _LEXICON.get(word.lower())
        if candidates is None:
            t = _unknown_tag(word, sentence[i - 1].lower() if i else None, tags[-1] if tags else None)
        else:
            t = _choose(word, candidates, tags, sentence[:i])
            # a verb-only word right after a determiner or adjective reads as a noun
            if tags and tags[-1] in DET_TAGS | {"JJ"} and t in VERB_TAGS and word.lower() not in _AUX_WORDS:
                t = "NNS" if t == "VBZ" else "NN"
        tags.append(t)
    return tuple(tags)


_AUX_WORDS = frozenset(
    "be am is are was were been being have has had having do does did done doing".split()
)


def chunk_heads(pos: Sequence[str]) -> Tuple[Tuple[int, ...], Tuple[int, ...]]:
    """NP heads (``DT? JJ* NN+`` -> last noun; a bare pronoun is its own NP)
    and VP heads (maximal ``MD|TO|VB*`` run -> last verb)."""
    np_heads, vp_heads = [], []
    n = len(pos)
    i = 0
    while i < n:
        j = i
        if pos[j] in DET_TAGS:
            j += 1
        while j < n and pos[j] == "JJ":
            j += 1
        k = j
        while k < n and pos[k] in NOUN_TAGS:
            k += 1
        if k > j:
            np_heads.append(k - 1)
            i = k
        elif pos[i] == "PRP":
            np_heads.append(i)
            i += 1
        else:
            i += 1
    i = 0
    while i < n:
        if pos[i] in VERB_TAGS or pos[i] in ("MD", "TO"):
            j = i
            last_verb = None
            while j < n and (pos[j] in VERB_TAGS or pos[j] in ("MD", "TO")):
                if pos[j] in VERB_TAGS:
                    last_verb = j
                j += 1
            if last_verb is not None:
                vp_heads.append(last_verb)
            i = j
        else:
            i += 1
    return tuple(np_heads), tuple(vp_heads)


@lru_cache(maxsize=1 << 16)
def _builtin(sentence: Tuple[str, ...]) -> TokenAnnotations:
    pos = tag(sentence)
    np_heads, vp_heads = chunk_heads(pos)
    return TokenAnnotations(pos, np_heads, vp_heads)


class BuiltinAnnotator:
    backend = "builtin"

    def annotate(self, sentence: Sequence[str]) -> TokenAnnotations:
        return _builtin(tuple(sentence))

    def __reduce__(self):
        return (BuiltinAnnotator, ())


class FileAnnotator:
    """Precomputed annotations keyed by the space-joined sentence."""

    backend = "file"

    def __init__(self, table: Dict[str, TokenAnnotations]):
        self.table = dict(table)

    def annotate(self, sentence: Sequence[str]) -> TokenAnnotations:
        key = " ".join(sentence)
        try:
            return self.table[key]
        except KeyError:
            raise KeyError(f"no annotation for sentence {key!r}") from None

    @classmethod
    def from_text(cls, text: str) -> "FileAnnotator":
        return cls(parse_annotation_file(text))


AnnotationProvider = BuiltinAnnotator | FileAnnotator


def annotate(provider, sentence: Sequence[str]) -> TokenAnnotations:
    ann = provider.annotate(sentence)
    if len(ann.pos) != len(sentence):
        raise ValueError(
            f"annotation has {len(ann.pos)} tags for a {len(sentence)}-token sentence"
        )
    return ann


# ---------------------------------------------------------------------------
# annotation files: tokens / POS / "NP:i,j VP:k" blocks


def _heads_field(line: str, label: str, lineno: int) -> Tuple[int, ...]:
    for part in line.split():
        name, _, values = part.partition(":")
        if name == label:
            try:
                return tuple(sorted(int(v) for v in values.split(",") if v))
            except ValueError:
                raise ValueError(f"line {lineno}: bad head index list {part!r}") from None
    raise ValueError(f"line {lineno}: missing {label}: field")


def parse_annotation_file(text: str) -> Dict[str, TokenAnnotations]:
    table = {}
    lines = text.split("\n")
    i = 0
    while i < len(lines):
        if not lines[i].strip():
            i += 1
            continue
        if i + 2 >= len(lines):
            raise ValueError(f"line {i + 1}: truncated annotation block")
        words, pos, heads = lines[i].split(), lines[i + 1].split(), lines[i + 2]
        if len(words) != len(pos):
            raise ValueError(f"line {i + 2}: {len(pos)} tags for {len(words)} tokens")
        table[" ".join(words)] = TokenAnnotations(
            tuple(pos), _heads_field(heads, "NP", i + 3), _heads_field(heads, "VP", i + 3)
        )
        i += 3
    return table


def serialize_annotations(items: Iterable[Tuple[Sequence[str], TokenAnnotations]]) -> str:
    blocks = []
    for sentence, ann in items:
        heads = "NP:" + ",".join(map(str, ann.np_heads)) + " VP:" + ",".join(map(str, ann.vp_heads))
        blocks.append(f"{' '.join(sentence)}\n{' '.join(ann.pos)}\n{heads}\n")
    return "\n".join(blocks)
