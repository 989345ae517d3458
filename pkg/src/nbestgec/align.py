"""Token-level edit extraction, overlap tests and edit application."""

from __future__ import annotations

from array import array
from dataclasses import dataclass
from typing import Iterable, List, Optional, Sequence, Tuple

from . import kernels


@dataclass(frozen=True)
class Edit:
    """Replace ``source[start:end]`` (== ``source_tokens``) by ``replacement``."""

    start: int
    end: int
    source_tokens: Tuple[str, ...]
    replacement: Tuple[str, ...]
    hyp_rank: int = 1
    score: Optional[float] = None

    def __post_init__(self):
        if self.start < 0 or self.end < self.start:
            raise ValueError(f"invalid span ({self.start}, {self.end})")
        if len(self.source_tokens) != self.end - self.start:
            raise ValueError("source_tokens length does not match the span")
        if self.source_tokens == self.replacement:
            raise ValueError("no-op edit")

    @property
    def key(self):
        """Identity used for deduplication and matching: span plus replacement."""
        return (self.start, self.end, self.replacement)

    def __str__(self):
        src = " ".join(self.source_tokens) or "<eps>"
        hyp = " ".join(self.replacement) or "<eps>"
        return f"({self.start},{self.end}) {src} -> {hyp}"


def spans_overlap(s1: int, e1: int, s2: int, e2: int) -> bool:
    """Overlap of half-open token spans, with zero-width (insertion) spans
    conflicting when they sit at the same position or strictly inside the
    other span."""
    if s1 == e1 and s2 == e2:
        return s1 == s2
    if s1 == e1:
        return s2 < s1 < e2
    if s2 == e2:
        return s1 < s2 < e1
    return s1 < e2 and s2 < e1


def overlaps(a, b) -> bool:
    return spans_overlap(a.start, a.end, b.start, b.end)


def edit_equal(a, g) -> bool:
    """Strict match: identical span and identical replacement tokens."""
    return a.start == g.start and a.end == g.end and tuple(a.replacement) == tuple(g.replacement)


def _interned(source: Sequence[str], hypothesis: Sequence[str]):
    ids = {}
    a = array("i", [ids.setdefault(t, len(ids)) for t in source])
    b = array("i", [ids.setdefault(t, len(ids)) for t in hypothesis])
    return a, b


def alignment(source: Sequence[str], hypothesis: Sequence[str]) -> str:
    """Unit-cost alignment as a string over ``MSDI`` (one char per operation)."""
    return kernels.align_ops(*_interned(source, hypothesis))


def extract_edits(source: Sequence[str], hypothesis: Sequence[str], hyp_rank: int = 1) -> List[Edit]:
    """Phrase edits turning ``source`` into ``hypothesis``.

    Maximal runs of non-match operations become one edit, so the result is
    sorted, pairwise non-overlapping, and reproduces ``hypothesis`` under
    :func:`apply_edits`.
    """
    source = tuple(source)
    hypothesis = tuple(hypothesis)
    if source == hypothesis:
        return []
    ops = alignment(source, hypothesis)
    edits = []
    i = j = 0
    run_i = run_j = None
    for op in ops + "M":
        if op == "M":
            if run_i is not None:
                edits.append(Edit(run_i, i, source[run_i:i], hypothesis[run_j:j], hyp_rank))
                run_i = run_j = None
            i += 1
            j += 1
            continue
        if run_i is None:
            run_i, run_j = i, j
        if op in "SD":
            i += 1
        if op in "SI":
            j += 1
    return edits


def check_non_overlapping(edits: Sequence) -> None:
    for x, a in enumerate(edits):
        for b in edits[x + 1:]:
            if overlaps(a, b):
                raise ValueError(f"overlapping edits {a} and {b}")


def apply_edits(source: Sequence[str], edits: Iterable) -> Tuple[str, ...]:
    """Apply non-overlapping edits (``Edit`` or ``GoldEdit``) to ``source``.

    Edits are applied right to left so earlier offsets stay valid; an
    insertion and a replacement starting at the same index apply as
    insertion-then-replacement.
    """
    tokens = list(source)
    edits = sorted(edits, key=lambda e: (e.start, e.end))
    for e in edits:
        if e.end > len(tokens):
            raise ValueError(f"edit span ({e.start}, {e.end}) outside a {len(tokens)}-token source")
        expected = getattr(e, "source_tokens", None)
        if expected is not None and tuple(tokens[e.start:e.end]) != tuple(expected):
            raise ValueError(f"edit {e} does not match source tokens {tokens[e.start:e.end]}")
    check_non_overlapping(edits)
    for e in reversed(edits):
        tokens[e.start:e.end] = list(e.replacement)
    return tuple(tokens)


# ---------------------------------------------------------------------------
# edit list files: id, start, end, source phrase, replacement, rank, score


def serialize_edit_list(rows: Iterable[Tuple[int, Edit]]) -> str:
    out = []
    for sid, e in rows:
        score = "NA" if e.score is None else repr(float(e.score))
        out.append(
            f"{sid}\t{e.start}\t{e.end}\t{' '.join(e.source_tokens)}\t"
            f"{' '.join(e.replacement)}\t{e.hyp_rank}\t{score}\n"
        )
    return "".join(out)


def parse_edit_list(text: str) -> List[Tuple[int, Edit]]:
    rows = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        fields = line.split("\t")
        if len(fields) != 7:
            raise ValueError(f"line {lineno}: expected 7 tab-separated fields")
        sid, start, end, src, rep, rank, score = fields
        try:
            edit = Edit(
                int(start),
                int(end),
                tuple(src.split()),
                tuple(rep.split()),
                int(rank),
                None if score == "NA" else float(score),
            )
            rows.append((int(sid), edit))
        except ValueError as exc:
            raise ValueError(f"line {lineno}: {exc}") from None
    return rows
