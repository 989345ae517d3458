"""Corpus-level precision / recall / F-beta against multi-annotator gold edits,
and a paired bootstrap sign test."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, List, Sequence, Tuple

import numpy as np

from .align import edit_equal
from .corpus import AnnotatedSentence

Triple = Tuple[int, int, int]  # matched, proposed, gold


def f_beta(p: float, r: float, beta: float = 0.5) -> float:
    b2 = beta * beta
    denom = b2 * p + r
    if denom == 0:
        return 0.0
    return (1 + b2) * p * r / denom


def prf(matched: int, proposed: int, gold: int, beta: float = 0.5) -> Tuple[float, float, float]:
    """Precision and recall default to 1 on empty denominators."""
    p = matched / proposed if proposed else 1.0
    r = matched / gold if gold else 1.0
    return p, r, f_beta(p, r, beta)


@dataclass(frozen=True)
class EvalResult:
    precision: float
    recall: float
    f05: float
    matched: int
    proposed: int
    gold_count: int
    per_sentence: Tuple[Triple, ...] = ()
    annotators: Tuple[int, ...] = ()

    def report(self) -> str:
        return (
            f"P {self.precision:.4f}\nR {self.recall:.4f}\nF0.5 {self.f05:.4f}\n"
            f"matched/proposed/gold {self.matched}/{self.proposed}/{self.gold_count}\n"
        )

    def tsv(self) -> str:
        return (
            f"{self.precision!r}\t{self.recall!r}\t{self.f05!r}\t"
            f"{self.matched}\t{self.proposed}\t{self.gold_count}\n"
        )


def _check_edits(sent: AnnotatedSentence, edits: Sequence) -> None:
    n = len(sent.source)
    for e in edits:
        if not 0 <= e.start <= e.end <= n:
            raise ValueError(
                f"system edit ({e.start}, {e.end}) outside sentence {' '.join(sent.source)!r}"
            )
        expected = getattr(e, "source_tokens", None)
        if expected is not None and tuple(sent.source[e.start:e.end]) != tuple(expected):
            raise ValueError(f"system edit {e} does not match its source sentence")


def sentence_counts(sent: AnnotatedSentence, edits: Sequence) -> Tuple[Triple, int]:
    """(matched, proposed, gold) for the best annotator, and that annotator.

    The annotator with most matches wins; ties prefer fewer gold edits, then
    the lower id.
    """
    _check_edits(sent, edits)
    distinct = list({(e.start, e.end, tuple(e.replacement)): e for e in edits}.values())
    best = None
    for annotator in sorted(sent.annotations):
        gold = sent.annotations[annotator]
        matched = sum(1 for e in distinct if any(edit_equal(e, g) for g in gold))
        rank = (-matched, len(gold), annotator)
        if best is None or rank < best[0]:
            best = (rank, (matched, len(distinct), len(gold)), annotator)
    return best[1], best[2]


def aggregate(per_sentence: Sequence[Triple], beta: float = 0.5, annotators=()) -> EvalResult:
    matched = sum(t[0] for t in per_sentence)
    proposed = sum(t[1] for t in per_sentence)
    gold = sum(t[2] for t in per_sentence)
    p, r, f = prf(matched, proposed, gold, beta)
    return EvalResult(p, r, f, matched, proposed, gold, tuple(per_sentence), tuple(annotators))


def evaluate(pairs: Iterable[Tuple[AnnotatedSentence, Sequence]], beta: float = 0.5) -> EvalResult:
    triples: List[Triple] = []
    chosen: List[int] = []
    for sent, edits in pairs:
        t, annotator = sentence_counts(sent, list(edits))
        triples.append(t)
        chosen.append(annotator)
    return aggregate(triples, beta, chosen)


@dataclass(frozen=True)
class SignificanceResult:
    p_value: float
    wins_a: int
    wins_b: int
    ties: int

    def report(self, threshold: float = 0.01) -> str:
        mark = " *" if self.p_value < threshold else ""
        return (
            f"p {self.p_value:.4f}{mark}\n"
            f"wins_a/wins_b/ties {self.wins_a}/{self.wins_b}/{self.ties}\n"
        )


def sign_test(
    per_sentence_a: Sequence[Triple],
    per_sentence_b: Sequence[Triple],
    samples: int = 100,
    seed: int = 0,
    beta: float = 0.5,
) -> SignificanceResult:
    """One-tailed test that system A beats system B.

    Each bootstrap resample draws sentences with replacement and compares
    corpus F-beta; ``p = (#{F_A <= F_B} + 1) / (samples + 1)``.
    """
    a = np.asarray(per_sentence_a, dtype=np.int64).reshape(-1, 3)
    b = np.asarray(per_sentence_b, dtype=np.int64).reshape(-1, 3)
    if a.shape != b.shape:
        raise ValueError(f"systems cover {len(a)} and {len(b)} sentences")
    if len(a) == 0:
        raise ValueError("no sentences to compare")
    rng = np.random.default_rng(seed)
    wins_a = wins_b = ties = 0
    for _ in range(samples):
        idx = rng.integers(0, len(a), size=len(a))
        fa = prf(*(int(v) for v in a[idx].sum(axis=0)), beta)[2]
        fb = prf(*(int(v) for v in b[idx].sum(axis=0)), beta)[2]
        if fa > fb:
            wins_a += 1
        elif fb > fa:
            wins_b += 1
        else:
            ties += 1
    return SignificanceResult((wins_b + ties + 1) / (samples + 1), wins_a, wins_b, ties)
