"""Edit features, gold labelling, feature dictionaries and vectorization.

Each edit yields categorical ``template=value`` strings and named real
features, organised in four ablatable groups: the hypothesis rank (``smt``),
lexical and POS identity (``lexical_pos``), surrounding words and nearest
NP/VP heads (``context``), and language-model scores (``lm``).
"""

from __future__ import annotations

import math
from array import array
from collections import Counter
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, NamedTuple, Optional, Sequence, Tuple

from .align import Edit, apply_edits, edit_equal, extract_edits
from .annotate import BuiltinAnnotator, TokenAnnotations, annotate, nearest_head_left, nearest_head_right
from .corpus import AnnotatedSentence, NBestList
from .lm import NGramModel

GROUPS = ("smt", "lexical_pos", "context", "lm")

EPS = "<eps>"
NULL = "NULL"

HEAD_TEMPLATES = ("npL", "npR", "vpL", "vpR")

TEMPLATE_GROUP = {
    "rank": "smt",
    **{t: "lexical_pos" for t in ("src_phrase", "hyp_phrase", "src+hyp", "pos_src", "pos_hyp", "pos_src+hyp")},
    **{t: "context" for t in ("before_src", "before_hyp", "after_src", "after_hyp")},
    **{f"{h}{s}": "context" for h in HEAD_TEMPLATES for s in ("", "_src", "_hyp")},
    **{
        t: "lm"
        for t in (
            "lm_src", "lm_hyp", "lm_src_phrase", "lm_hyp_phrase", "lm_before_src",
            "lm_before_hyp", "lm_src_after", "lm_hyp_after", "lm_diff_phrase", "lm_diff_sent",
        )
    },
}


def normalize_groups(groups: Optional[Iterable[str]]) -> Tuple[str, ...]:
    if groups is None:
        return GROUPS
    groups = set(groups)
    unknown = groups - set(GROUPS)
    if unknown:
        raise ValueError(f"unknown feature groups: {sorted(unknown)}")
    if not groups:
        raise ValueError("at least one feature group must be enabled")
    return tuple(g for g in GROUPS if g in groups)


@dataclass(frozen=True)
class FeatureVector:
    categorical: Tuple[str, ...] = ()
    numerical: Dict[str, float] = field(default_factory=dict)

    def restrict(self, groups: Iterable[str]) -> "FeatureVector":
        keep = set(groups)
        return FeatureVector(
            tuple(c for c in self.categorical if TEMPLATE_GROUP[c.partition("=")[0]] in keep),
            {k: v for k, v in self.numerical.items() if TEMPLATE_GROUP[k] in keep},
        )


@dataclass(frozen=True)
class LabeledExample:
    vector: FeatureVector
    valid: bool
    sentence_id: int
    edit: Edit


def _phrase(tokens: Sequence[str]) -> str:
    return " ".join(tokens) if tokens else EPS


def _hypothesis_pos(edit: Edit, source: Sequence[str], nbest: Optional[NBestList], provider) -> Tuple[str, ...]:
    """Tags of the replacement tokens, read from the best-ranked hypothesis
    containing the edit (or the source with just this edit applied)."""
    if not edit.replacement:
        return ()
    if nbest is not None and 1 <= edit.hyp_rank <= len(nbest.entries):
        hyp = nbest.entries[edit.hyp_rank - 1].hypothesis
        offset = 0
        for e in extract_edits(source, hyp):
            if e.key == edit.key:
                start = edit.start + offset
                pos = annotate(provider, hyp).pos
                return pos[start:start + len(edit.replacement)]
            if e.start >= edit.start:
                break
            offset += len(e.replacement) - (e.end - e.start)
    hyp = apply_edits(source, [edit])
    return annotate(provider, hyp).pos[edit.start:edit.start + len(edit.replacement)]


def extract_features(
    edit: Edit,
    source: Sequence[str],
    nbest: Optional[NBestList],
    ann: TokenAnnotations,
    lm: Optional[NGramModel],
    groups: Optional[Iterable[str]] = None,
    provider=None,
) -> FeatureVector:
    groups = normalize_groups(groups)
    source = tuple(source)
    if len(ann.pos) != len(source):
        raise ValueError(f"annotation has {len(ann.pos)} tags for a {len(source)}-token source")
    provider = provider or BuiltinAnnotator()
    src = _phrase(edit.source_tokens)
    hyp = _phrase(edit.replacement)
    before = source[edit.start - 1] if edit.start > 0 else NULL
    after = source[edit.end] if edit.end < len(source) else NULL

    cat: List[str] = []
    num: Dict[str, float] = {}
    if "smt" in groups:
        num["rank"] = float(edit.hyp_rank)
    if "lexical_pos" in groups:
        pos_src = "_".join(ann.pos[edit.start:edit.end]) or EPS
        pos_hyp = "_".join(_hypothesis_pos(edit, source, nbest, provider)) or EPS
        cat += [
            f"src_phrase={src}",
            f"hyp_phrase={hyp}",
            f"src+hyp={src}+{hyp}",
            f"pos_src={pos_src}",
            f"pos_hyp={pos_hyp}",
            f"pos_src+hyp={pos_src}+{pos_hyp}",
        ]
    if "context" in groups:
        cat += [
            f"before_src={before}+{src}",
            f"before_hyp={before}+{hyp}",
            f"after_src={src}+{after}",
            f"after_hyp={hyp}+{after}",
        ]
        heads = {
            "npL": nearest_head_left(ann.np_heads, edit.start),
            "npR": nearest_head_right(ann.np_heads, edit.end),
            "vpL": nearest_head_left(ann.vp_heads, edit.start),
            "vpR": nearest_head_right(ann.vp_heads, edit.end),
        }
        for name in HEAD_TEMPLATES:
            index = heads[name]
            word = NULL if index is None else source[index]
            cat += [f"{name}={word}+{src}+{hyp}", f"{name}_src={word}+{src}", f"{name}_hyp={word}+{hyp}"]
    if "lm" in groups:
        if lm is None:
            raise ValueError("the lm feature group needs a language model")
        left = () if edit.start == 0 else (before,)
        right = () if edit.end == len(source) else (after,)
        hyp_sentence = apply_edits(source, [edit])
        score = lm.score_sequence
        num["lm_src"] = score(source, pad=True)
        num["lm_hyp"] = score(hyp_sentence, pad=True)
        num["lm_src_phrase"] = score(edit.source_tokens)
        num["lm_hyp_phrase"] = score(edit.replacement)
        num["lm_before_src"] = score(left + edit.source_tokens)
        num["lm_before_hyp"] = score(left + edit.replacement)
        num["lm_src_after"] = score(edit.source_tokens + right)
        num["lm_hyp_after"] = score(edit.replacement + right)
        num["lm_diff_phrase"] = num["lm_hyp_phrase"] - num["lm_src_phrase"]
        num["lm_diff_sent"] = num["lm_hyp"] - num["lm_src"]
    return FeatureVector(tuple(cat), num)


class FeatureExtractor:
    """Bundles the LM, annotation provider and enabled groups."""

    def __init__(self, lm: Optional[NGramModel], provider=None, groups: Optional[Iterable[str]] = None):
        self.lm = lm
        self.provider = provider or BuiltinAnnotator()
        self.groups = normalize_groups(groups)

    def __call__(self, edit: Edit, source: Sequence[str], nbest: Optional[NBestList] = None) -> FeatureVector:
        ann = annotate(self.provider, source)
        return extract_features(edit, source, nbest, ann, self.lm, self.groups, self.provider)


def collect_edits(nbest: NBestList, n: Optional[int] = None) -> List[Edit]:
    """Distinct edits (by span and replacement) across the top ``n``
    hypotheses, each tagged with the best rank it occurs in."""
    seen = {}
    for entry in nbest.top(n):
        for e in extract_edits(nbest.source, entry.hypothesis, entry.rank):
            seen.setdefault(e.key, e)
    return list(seen.values())


def label_edits(nbest: NBestList, gold: AnnotatedSentence, extractor: FeatureExtractor) -> List[LabeledExample]:
    """One example per distinct edit; valid iff it matches any annotator's gold edit."""
    if tuple(gold.source) != tuple(nbest.source):
        raise ValueError(f"n-best list {nbest.source_id} and gold sentence disagree on the source")
    pooled = gold.gold()
    out = []
    for e in collect_edits(nbest):
        valid = any(edit_equal(e, g) for g in pooled)
        out.append(LabeledExample(extractor(e, nbest.source, nbest), valid, nbest.source_id, e))
    return out


# ---------------------------------------------------------------------------
# dictionary and vectors


class SparseVector(NamedTuple):
    indices: array  # 'i'
    values: array  # 'd'


@dataclass
class FeatureDictionary:
    index: Dict[str, int]
    numerical: List[str]
    means: List[float]
    stds: List[float]
    groups: Tuple[str, ...] = GROUPS

    @property
    def dim(self) -> int:
        return len(self.index) + len(self.numerical)


def build_dictionary(vectors: Sequence[FeatureVector], min_count: int = 1, groups=GROUPS) -> FeatureDictionary:
    vectors = [getattr(v, "vector", v) for v in vectors]
    if not vectors:
        raise ValueError("cannot build a feature dictionary from no examples")
    counts = Counter(c for v in vectors for c in v.categorical)
    index: Dict[str, int] = {}
    for v in vectors:
        for c in v.categorical:
            if c not in index and counts[c] >= min_count:
                index[c] = len(index)
    names: List[str] = []
    for v in vectors:
        for k in v.numerical:
            if k not in names:
                names.append(k)
    means, stds = [], []
    for k in names:
        xs = [v.numerical[k] for v in vectors if k in v.numerical]
        mean = math.fsum(xs) / len(xs)
        var = math.fsum((x - mean) ** 2 for x in xs) / len(xs)
        std = math.sqrt(var)
        means.append(mean)
        stds.append(std if std > 0 else 1.0)
    return FeatureDictionary(index, names, means, stds, normalize_groups(groups))


def vectorize(v: FeatureVector, d: FeatureDictionary) -> SparseVector:
    idx = array("i")
    val = array("d")
    seen = set()
    for c in v.categorical:
        i = d.index.get(c)
        if i is not None and i not in seen:
            seen.add(i)
            idx.append(i)
            val.append(1.0)
    base = len(d.index)
    for j, name in enumerate(d.numerical):
        x = v.numerical.get(name)
        if x is None or not math.isfinite(x):
            continue
        z = (x - d.means[j]) / d.stds[j]
        if z != 0.0:
            idx.append(base + j)
            val.append(z)
    return SparseVector(idx, val)


def serialize_dictionary(d: FeatureDictionary) -> str:
    lines = [f"dictionary groups {','.join(d.groups)} categorical {len(d.index)} numerical {len(d.numerical)}\n"]
    for feat, i in sorted(d.index.items(), key=lambda kv: kv[1]):
        lines.append(f"c\t{i}\t{feat}\n")
    for name, mean, std in zip(d.numerical, d.means, d.stds):
        lines.append(f"n\t{name}\t{mean!r}\t{std!r}\n")
    return "".join(lines)


def parse_dictionary(text: str) -> FeatureDictionary:
    lines = text.splitlines()
    head = lines[0].split() if lines else []
    if len(head) != 7 or head[0] != "dictionary":
        raise ValueError("line 1: not a feature dictionary header")
    index, names, means, stds = {}, [], [], []
    for lineno, line in enumerate(lines[1:], start=2):
        parts = line.split("\t")
        if parts[0] == "c" and len(parts) == 3:
            index[parts[2]] = int(parts[1])
        elif parts[0] == "n" and len(parts) == 4:
            names.append(parts[1])
            means.append(float(parts[2]))
            stds.append(float(parts[3]))
        else:
            raise ValueError(f"line {lineno}: malformed dictionary entry")
    if sorted(index.values()) != list(range(len(index))):
        raise ValueError("categorical ids must be dense from 0")
    return FeatureDictionary(index, names, means, stds, normalize_groups(head[2].split(",")))


# ---------------------------------------------------------------------------
# labelled example files


def _escape(feature: str) -> str:
    return feature.replace("\\", "\\\\").replace(";", "\\;")


def _split_escaped(text: str) -> List[str]:
    if not text:
        return []
    out, buf, i = [], [], 0
    while i < len(text):
        ch = text[i]
        if ch == "\\" and i + 1 < len(text):
            buf.append(text[i + 1])
            i += 2
            continue
        if ch == ";":
            out.append("".join(buf))
            buf = []
        else:
            buf.append(ch)
        i += 1
    out.append("".join(buf))
    return out


def serialize_examples(examples: Iterable[LabeledExample]) -> str:
    out = []
    for ex in examples:
        e = ex.edit
        cats = ";".join(_escape(c) for c in ex.vector.categorical)
        nums = " ".join(f"{k}={v!r}" for k, v in ex.vector.numerical.items())
        out.append(
            f"{int(ex.valid)}\t{ex.sentence_id}\t{e.start}\t{e.end}\t{' '.join(e.source_tokens)}\t"
            f"{' '.join(e.replacement)}\t{e.hyp_rank}\t{cats}\t{nums}\n"
        )
    return "".join(out)


def parse_examples(text: str) -> List[LabeledExample]:
    out = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line:
            continue
        parts = line.split("\t")
        if len(parts) != 9:
            raise ValueError(f"line {lineno}: expected 9 tab-separated fields, got {len(parts)}")
        label, sid, start, end, src, rep, rank, cats, nums = parts
        numerical = {}
        for item in nums.split():
            k, _, v = item.partition("=")
            numerical[k] = float(v)
        edit = Edit(int(start), int(end), tuple(src.split()), tuple(rep.split()), int(rank))
        out.append(
            LabeledExample(FeatureVector(tuple(_split_escaped(cats)), numerical), label == "1", int(sid), edit)
        )
    return out
