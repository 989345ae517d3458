"""Data model and readers/writers for annotated corpora, plain text and n-best lists.

Annotated corpora use the CoNLL shared-task "S/A" layout::

    S He carries a gun into his pocket .
    A 4 5|||Prep|||in|||REQUIRED|||-NONE-|||0

N-best lists use the Moses layout, one hypothesis per line::

    0 ||| The cat sat . ||| lm= -4.2 tm= -1.1 ||| -5.3

Sentences are plain tuples of token strings.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

from .align import spans_overlap

Sentence = Tuple[str, ...]

NOOP_TYPE = "noop"


class FormatError(ValueError):
    """Raised for malformed input files; carries the 1-based line number."""

    def __init__(self, message: str, line: Optional[int] = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


def tokens(text: str) -> Sentence:
    return tuple(text.split())


def detokenize(sentence: Sequence[str]) -> str:
    return " ".join(sentence)


@dataclass(frozen=True)
class GoldEdit:
    start: int
    end: int
    replacement: Sentence
    error_type: str = ""
    annotator: int = 0

    def __post_init__(self):
        if self.start < 0 or self.end < self.start:
            raise ValueError(f"invalid gold span ({self.start}, {self.end})")
        if self.start == self.end and not self.replacement:
            raise ValueError("no-op gold edit (empty insertion)")

    @property
    def key(self):
        return (self.start, self.end, self.replacement)


@dataclass(frozen=True)
class AnnotatedSentence:
    source: Sentence
    annotations: Mapping[int, Tuple[GoldEdit, ...]] = field(default_factory=lambda: {0: ()})

    def __post_init__(self):
        if not self.annotations:
            raise ValueError("an annotated sentence needs at least one annotator")
        n = len(self.source)
        for annotator, edits in self.annotations.items():
            for g in edits:
                if g.end > n:
                    raise ValueError(
                        f"gold edit ({g.start}, {g.end}) out of bounds for sentence "
                        f"{detokenize(self.source)!r}"
                    )
            for i, a in enumerate(edits):
                if any(spans_overlap(a.start, a.end, b.start, b.end) for b in edits[i + 1:]):
                    raise ValueError(
                        f"overlapping gold edits for annotator {annotator} in sentence "
                        f"{detokenize(self.source)!r}"
                    )

    @classmethod
    def build(cls, source: Sequence[str], edits_by_annotator: Mapping[int, Sequence[GoldEdit]]):
        """Construct with canonical ordering: annotators ascending, edits by span."""
        annotations = {
            a: tuple(sorted(edits_by_annotator[a], key=lambda g: (g.start, g.end, g.replacement)))
            for a in sorted(edits_by_annotator)
        }
        return cls(tuple(source), annotations or {0: ()})

    def gold(self, annotator: Optional[int] = None) -> Tuple[GoldEdit, ...]:
        """Gold edits of one annotator, or of all annotators pooled."""
        if annotator is not None:
            return self.annotations[annotator]
        return tuple(g for a in sorted(self.annotations) for g in self.annotations[a])


@dataclass(frozen=True)
class NBestEntry:
    rank: int
    hypothesis: Sentence
    decoder_features: Mapping[str, float]
    decoder_score: float


@dataclass(frozen=True)
class NBestList:
    source_id: int
    source: Sentence
    entries: Tuple[NBestEntry, ...]

    def __post_init__(self):
        if not self.entries:
            raise ValueError(f"n-best list {self.source_id} has no hypotheses")
        for expected, entry in enumerate(self.entries, start=1):
            if entry.rank != expected:
                raise ValueError(f"n-best list {self.source_id}: ranks must be 1..k")

    def top(self, n: Optional[int] = None) -> Tuple[NBestEntry, ...]:
        return self.entries if n is None else self.entries[:n]

    @property
    def feature_names(self) -> Tuple[str, ...]:
        return tuple(self.entries[0].decoder_features)


# ---------------------------------------------------------------------------
# annotated corpora


def _parse_a_line(line: str, lineno: int):
    fields = line[2:].split("|||")
    if len(fields) != 6:
        raise FormatError(f"expected 6 '|||'-separated fields, got {len(fields)}", lineno)
    span = fields[0].split()
    if len(span) != 2:
        raise FormatError("expected '<start> <end>' before the first '|||'", lineno)
    try:
        start, end = int(span[0]), int(span[1])
        annotator = int(fields[5])
    except ValueError:
        raise FormatError("span offsets and annotator id must be integers", lineno) from None
    error_type = fields[1]
    replacement = fields[2].strip()
    if start == -1 and end == -1:
        if error_type != NOOP_TYPE:
            raise FormatError("span -1 -1 is reserved for noop lines", lineno)
        return annotator, None
    if replacement == "-NONE-":
        replacement = ""
    try:
        return annotator, GoldEdit(start, end, tokens(replacement), error_type, annotator)
    except ValueError as exc:
        raise FormatError(str(exc), lineno) from None


def parse_annotated(text: str) -> List[AnnotatedSentence]:
    """Parse an S/A annotated corpus."""
    dataset: List[AnnotatedSentence] = []
    source: Optional[Sentence] = None
    edits: Dict[int, List[GoldEdit]] = {}
    source_line = 0

    def flush():
        try:
            dataset.append(AnnotatedSentence.build(source, edits))
        except ValueError as exc:
            raise FormatError(f"sentence {len(dataset)}: {exc}", source_line) from None

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.rstrip("\r")
        if not line.strip():
            continue
        if line == "S" or line.startswith("S "):
            if source is not None:
                flush()
            source = tokens(line[2:])
            edits = {}
            source_line = lineno
        elif line.startswith("A "):
            if source is None:
                raise FormatError("'A' line before any 'S' line", lineno)
            annotator, gold = _parse_a_line(line, lineno)
            bucket = edits.setdefault(annotator, [])
            if gold is not None:
                if gold.end > len(source):
                    raise FormatError(
                        f"gold span ({gold.start}, {gold.end}) out of bounds for sentence "
                        f"{len(dataset)} {detokenize(source)!r}",
                        lineno,
                    )
                bucket.append(gold)
        else:
            raise FormatError(f"unrecognised line {line[:40]!r}", lineno)
    if source is not None:
        flush()
    return dataset


def _a_line(g: GoldEdit) -> str:
    return (
        f"A {g.start} {g.end}|||{g.error_type}|||{detokenize(g.replacement)}"
        f"|||REQUIRED|||-NONE-|||{g.annotator}"
    )


def serialize_annotated(dataset: Sequence[AnnotatedSentence]) -> str:
    blocks = []
    for sent in dataset:
        lines = ["S " + detokenize(sent.source)]
        implicit = list(sent.annotations) == [0] and not sent.annotations[0]
        if not implicit:
            for annotator in sorted(sent.annotations):
                gold = sent.annotations[annotator]
                if not gold:
                    lines.append(f"A -1 -1|||{NOOP_TYPE}|||-NONE-|||REQUIRED|||-NONE-|||{annotator}")
                for g in gold:
                    lines.append(_a_line(g))
        blocks.append("\n".join(lines) + "\n")
    return "\n".join(blocks)


# ---------------------------------------------------------------------------
# plain text


def parse_sentences(text: str) -> List[Sentence]:
    """One tokenized sentence per line. Blank lines are empty sentences."""
    return [tokens(line) for line in text.splitlines()]


def serialize_sentences(sentences: Sequence[Sequence[str]]) -> str:
    return "".join(detokenize(s) + "\n" for s in sentences)


# ---------------------------------------------------------------------------
# n-best lists


def _parse_features(field_text: str, lineno: int) -> Dict[str, float]:
    """``lm= -4.2 tm= -1.1 -0.3`` -> {lm: -4.2, tm_0: -1.1, tm_1: -0.3}."""
    groups: List[Tuple[str, List[float]]] = []
    for item in field_text.split():
        if item.endswith("="):
            groups.append((item[:-1], []))
            continue
        if "=" in item:
            name, _, value = item.partition("=")
            groups.append((name, []))
            item = value
        if not groups:
            raise FormatError(f"feature value {item!r} has no name", lineno)
        try:
            groups[-1][1].append(float(item))
        except ValueError:
            raise FormatError(f"bad feature value {item!r}", lineno) from None
    features: Dict[str, float] = {}
    for name, values in groups:
        if not values:
            raise FormatError(f"feature {name!r} has no value", lineno)
        if len(values) == 1:
            keys = [name]
        else:
            keys = [f"{name}_{i}" for i in range(len(values))]
        for key, value in zip(keys, values):
            if key in features:
                raise FormatError(f"duplicate feature {key!r}", lineno)
            features[key] = value
    return features


def parse_nbest(text: str, sources: Sequence[Sequence[str]]) -> List[NBestList]:
    """Parse a Moses n-best file against its companion source sentences.

    Every source must receive at least one hypothesis, ids must appear in
    non-decreasing contiguous blocks, and all entries must share one feature
    schema.
    """
    grouped: List[List[NBestEntry]] = []
    schema: Optional[Tuple[str, ...]] = None
    current = -1
    for lineno, raw in enumerate(text.splitlines(), start=1):
        if not raw.strip():
            continue
        fields = [f.strip() for f in raw.split("|||")]
        if len(fields) != 4:
            raise FormatError(f"expected 4 '|||'-separated fields, got {len(fields)}", lineno)
        try:
            sid = int(fields[0])
        except ValueError:
            raise FormatError(f"bad source id {fields[0]!r}", lineno) from None
        if sid < current:
            raise FormatError(f"source id {sid} after {current}: blocks must be non-decreasing", lineno)
        if sid > current:
            if sid != current + 1:
                raise FormatError(f"source {current + 1} has no hypotheses", lineno)
            current = sid
            grouped.append([])
        features = _parse_features(fields[2], lineno)
        if schema is None:
            schema = tuple(features)
        elif tuple(features) != schema:
            raise FormatError(
                f"feature schema {tuple(features)} differs from {schema}", lineno
            )
        try:
            total = float(fields[3])
        except ValueError:
            raise FormatError(f"bad total score {fields[3]!r}", lineno) from None
        block = grouped[-1]
        block.append(NBestEntry(len(block) + 1, tokens(fields[1]), features, total))
    if len(grouped) != len(sources):
        raise FormatError(
            f"n-best file covers {len(grouped)} sources but {len(sources)} were supplied"
        )
    return [
        NBestList(sid, tuple(sources[sid]), tuple(entries)) for sid, entries in enumerate(grouped)
    ]


def serialize_nbest(lists: Sequence[NBestList]) -> str:
    out = []
    for nb in lists:
        for e in nb.entries:
            feats = " ".join(f"{k}= {float(v)!r}" for k, v in e.decoder_features.items())
            out.append(
                f"{nb.source_id} ||| {detokenize(e.hypothesis)} ||| {feats} ||| {float(e.decoder_score)!r}\n"
            )
    return "".join(out)
