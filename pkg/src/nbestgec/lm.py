"""Count-based n-gram language model with stupid-backoff scoring (log10).

Counts are kept for every n-gram (n <= order) that ends at a predicted
token, plus the begin-marker prefixes that serve as histories, so the
count of any history equals the summed counts of its continuations.
"""

from __future__ import annotations

import math
from collections import Counter
from typing import Dict, Iterable, Sequence, Tuple

BOS = "<s>"
EOS = "</s>"

DEFAULT_BACKOFF = 0.4
DEFAULT_OOV_LOG10 = -7.0


class NGramModel:
    def __init__(
        self,
        order: int,
        counts: Dict[Tuple[str, ...], int],
        backoff_factor: float = DEFAULT_BACKOFF,
        oov_log10: float = DEFAULT_OOV_LOG10,
    ):
        if not 1 <= order <= 5:
            raise ValueError(f"order must be in [1, 5], got {order}")
        if not 0.0 < backoff_factor <= 1.0:
            raise ValueError("backoff factor must lie in (0, 1]")
        if not oov_log10 < 0:
            raise ValueError("oov_log10 must be negative")
        self.order = order
        self.counts = dict(counts)
        self.backoff_factor = backoff_factor
        self.oov_log10 = oov_log10
        self._log_backoff = math.log10(backoff_factor)
        self.total_unigrams = sum(c for g, c in self.counts.items() if len(g) == 1 and g[0] != BOS)

    def __eq__(self, other):
        return (
            isinstance(other, NGramModel)
            and self.order == other.order
            and self.counts == other.counts
            and self.backoff_factor == other.backoff_factor
            and self.oov_log10 == other.oov_log10
        )

    def count(self, ngram: Sequence[str]) -> int:
        return self.counts.get(tuple(ngram), 0)

    def token_log10(self, history: Sequence[str], word: str) -> float:
        """Stupid-backoff log10 score of ``word`` after ``history``."""
        counts = self.counts
        if (word,) not in counts:
            return self.oov_log10
        history = tuple(history[len(history) - self.order + 1:]) if self.order > 1 else ()
        penalty = 0.0
        while history:
            numerator = counts.get(history + (word,), 0)
            if numerator:
                return penalty + math.log10(numerator / counts[history])
            penalty += self._log_backoff
            history = history[1:]
        return penalty + math.log10(counts[(word,)] / self.total_unigrams)

    def score_sequence(self, tokens: Sequence[str], pad: bool = False) -> float:
        """Sum of per-token log10 scores.

        With ``pad`` the sequence is wrapped in begin/end markers and the end
        marker is scored too; without it the phrase is scored bare, its first
        token as a unigram.
        """
        tokens = tuple(tokens)
        if pad:
            seq = (BOS,) * (self.order - 1) + tokens + (EOS,)
            first = self.order - 1
        else:
            seq = tokens
            first = 0
        total = 0.0
        for i in range(first, len(seq)):
            total += self.token_log10(seq[max(0, i - self.order + 1):i], seq[i])
        return total


def count_ngrams(corpus: Iterable[Sequence[str]], order: int) -> Counter:
    counts: Counter = Counter()
    for sentence in corpus:
        seq = (BOS,) * (order - 1) + tuple(sentence) + (EOS,)
        for n in range(1, order):
            counts[(BOS,) * n] += 1
        for i in range(order - 1, len(seq)):
            for n in range(1, order + 1):
                counts[seq[i - n + 1:i + 1]] += 1
    return counts


def train_lm(
    corpus: Sequence[Sequence[str]],
    order: int = 5,
    backoff_factor: float = DEFAULT_BACKOFF,
    oov_log10: float = DEFAULT_OOV_LOG10,
) -> NGramModel:
    if not 1 <= order <= 5:
        raise ValueError(f"order must be in [1, 5], got {order}")
    if not corpus:
        raise ValueError("cannot train a language model on an empty corpus")
    return NGramModel(order, count_ngrams(corpus, order), backoff_factor, oov_log10)


def lm_delta(model: NGramModel, a: Sequence[str], b: Sequence[str]) -> float:
    """log10 LM(b) - log10 LM(a), both sentence-padded."""
    return model.score_sequence(b, pad=True) - model.score_sequence(a, pad=True)


def serialize_lm(model: NGramModel) -> str:
    lines = [f"order {model.order} backoff {model.backoff_factor!r} oov {model.oov_log10!r}\n"]
    for gram in sorted(model.counts, key=lambda g: (len(g), g)):
        lines.append(f"{model.counts[gram]}\t{' '.join(gram)}\n")
    return "".join(lines)


def parse_lm(text: str) -> NGramModel:
    lines = text.splitlines()
    if not lines:
        raise ValueError("empty language model file")
    head = lines[0].split()
    if len(head) != 6 or head[0::2] != ["order", "backoff", "oov"]:
        raise ValueError("line 1: expected 'order <n> backoff <f> oov <x>'")
    counts = {}
    for lineno, line in enumerate(lines[1:], start=2):
        if not line:
            continue
        count, sep, gram = line.partition("\t")
        if not sep:
            raise ValueError(f"line {lineno}: expected '<count>\\t<tokens>'")
        counts[tuple(gram.split(" "))] = int(count)
    return NGramModel(int(head[1]), counts, float(head[3]), float(head[5]))
