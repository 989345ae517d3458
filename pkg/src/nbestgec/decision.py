"""Turning scored n-best lists into corrections.

Two strategies share one edit scorer: log-linear reranking, where the mean
classifier score of a hypothesis' edits joins the decoder features, and
greedy edit selection, which may assemble a sentence that appears nowhere
in the list.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from .align import Edit, apply_edits, extract_edits, overlaps
from .corpus import AnnotatedSentence, NBestEntry, NBestList
from .features import FeatureDictionary, FeatureExtractor, collect_edits, vectorize
from .m2 import prf, sentence_counts

EDIT_FEATURE = "edit_classifier_avg"
MODES = ("baseline_1best", "rerank", "select")

# (edit, nbest) -> classifier margin
Scorer = Callable[[Edit, NBestList], float]
Pool = Dict[tuple, Edit]


class EditScorer:
    """Classifier margin of an edit, from its features in the n-best list."""

    def __init__(self, model, dictionary: FeatureDictionary, extractor: FeatureExtractor):
        self.model = model
        self.dictionary = dictionary
        self.extractor = extractor

    def __call__(self, edit: Edit, nbest: NBestList) -> float:
        vector = self.extractor(edit, nbest.source, nbest)
        return self.model.score(vectorize(vector, self.dictionary))


@dataclass(frozen=True)
class DecisionConfig:
    mode: str = "select"
    n: Optional[int] = None
    tau: float = 0.0

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}, got {self.mode!r}")
        if self.n is not None and self.n < 1:
            raise ValueError("n must be >= 1")


def scored_pool(nbest: NBestList, scorer: Scorer) -> Pool:
    """Every distinct edit of the full list, scored once, keyed by span+replacement."""
    return {e.key: Edit(e.start, e.end, e.source_tokens, e.replacement, e.hyp_rank, scorer(e, nbest))
            for e in collect_edits(nbest)}


def hypothesis_edit_feature(entry: NBestEntry, nbest: NBestList, scorer: Scorer, pool: Optional[Pool] = None) -> float:
    """Mean classifier score over the hypothesis' edits; 0.0 for an unedited hypothesis."""
    edits = extract_edits(nbest.source, entry.hypothesis, entry.rank)
    if not edits:
        return 0.0
    if pool is None:
        pool = scored_pool(nbest, scorer)
    return math.fsum(pool[e.key].score for e in edits) / len(edits)


# ---------------------------------------------------------------------------
# reranking


def _check_schema(nbest: NBestList, weights: Mapping[str, float]) -> Tuple[str, ...]:
    names = nbest.feature_names
    expected = set(names) | {EDIT_FEATURE}
    if set(weights) - expected or set(names) - set(weights):
        raise ValueError(
            f"weights {sorted(weights)} do not match decoder features {list(names)} + {EDIT_FEATURE}"
        )
    return names


def feature_matrix(nbest: NBestList, scorer: Optional[Scorer], n: Optional[int] = None,
                   pool: Optional[Pool] = None) -> np.ndarray:
    """Rows: hypotheses (top ``n``); columns: decoder features then the edit feature."""
    entries = nbest.top(n)
    names = nbest.feature_names
    if scorer is not None and pool is None:
        pool = scored_pool(nbest, scorer)
    rows = []
    for entry in entries:
        edit_feature = 0.0 if scorer is None else hypothesis_edit_feature(entry, nbest, scorer, pool)
        rows.append([entry.decoder_features[k] for k in names] + [edit_feature])
    return np.asarray(rows, dtype=np.float64)


def _linear_scores(h: np.ndarray, w: np.ndarray) -> np.ndarray:
    # fixed left-to-right accumulation so batched and per-list scores agree bit for bit
    s = h[..., 0] * w[0]
    for f in range(1, len(w)):
        s = s + h[..., f] * w[f]
    return s


def rescore(nbest: NBestList, weights: Mapping[str, float], scorer: Optional[Scorer] = None,
            n: Optional[int] = None, pool: Optional[Pool] = None) -> List[Tuple[NBestEntry, float]]:
    """Entries of the top ``n`` with their new log-linear scores, best first
    (ties keep the original rank order)."""
    names = _check_schema(nbest, weights)
    w = np.asarray([weights[k] for k in names] + [weights.get(EDIT_FEATURE, 0.0)], dtype=np.float64)
    if w[-1] == 0.0:
        scorer = None
    h = feature_matrix(nbest, scorer, n, pool)
    s = _linear_scores(h, w)
    entries = nbest.top(n)
    order = sorted(range(len(entries)), key=lambda k: (-s[k], k))
    return [(entries[k], float(s[k])) for k in order]


# ---------------------------------------------------------------------------
# edit selection


def selection_order(e: Edit):
    return (-e.score, e.start, e.hyp_rank, e.replacement, e.end)


def greedy_select(edits: Sequence[Edit], tau: float) -> List[Edit]:
    """Highest-scoring first, skipping anything that overlaps an accepted
    edit; edits scoring below ``tau`` are discarded up front."""
    accepted: List[Edit] = []
    for e in sorted((e for e in edits if e.score >= tau), key=selection_order):
        if not any(overlaps(e, a) for a in accepted):
            accepted.append(e)
    return sorted(accepted, key=lambda e: (e.start, e.end))


def select_edits(nbest: NBestList, scorer: Scorer, tau: float, n: Optional[int] = None,
                 pool: Optional[Pool] = None) -> List[Edit]:
    if n is not None and n < 1:
        raise ValueError("n must be >= 1")
    if pool is None:
        pool = scored_pool(nbest, scorer)
    limit = n if n is not None else len(nbest.entries)
    return greedy_select([e for e in pool.values() if e.hyp_rank <= limit], tau)


def correct(nbest: NBestList, cfg: DecisionConfig, weights: Optional[Mapping[str, float]] = None,
            scorer: Optional[Scorer] = None, pool: Optional[Pool] = None):
    """(corrected sentence, its edits against the source) under ``cfg``."""
    if cfg.mode == "baseline_1best":
        hyp = nbest.entries[0].hypothesis
    elif cfg.mode == "rerank":
        if weights is None:
            raise ValueError("reranking needs log-linear weights")
        hyp = rescore(nbest, weights, scorer, cfg.n, pool)[0][0].hypothesis
    else:
        edits = select_edits(nbest, scorer, cfg.tau, cfg.n, pool)
        return apply_edits(nbest.source, edits), edits
    return hyp, extract_edits(nbest.source, hyp)


# ---------------------------------------------------------------------------
# tuning


def threshold_objective(dev: Sequence[Tuple[NBestList, AnnotatedSentence]], scorer: Scorer,
                        n: Optional[int] = None, pools: Optional[Sequence[Pool]] = None):
    """tau -> corpus F0.5 of edit selection over ``dev``."""
    if pools is None:
        pools = [scored_pool(nb, scorer) for nb, _ in dev]
    candidates = []
    for (nb, _), pool in zip(dev, pools):
        limit = n if n is not None else len(nb.entries)
        candidates.append([e for e in pool.values() if e.hyp_rank <= limit])

    def objective(tau: float) -> float:
        totals = [0, 0, 0]
        for (_, gold), edits in zip(dev, candidates):
            t, _ = sentence_counts(gold, greedy_select(edits, tau))
            for i in range(3):
                totals[i] += t[i]
        return prf(*totals)[2]

    return objective


class _RerankObjective:
    """Corpus F0.5 of the reranked top-1, vectorised over sentences."""

    def __init__(self, dev, scorer, n, pools=None):
        blocks, triples = [], []
        for i, (nb, gold) in enumerate(dev):
            pool = pools[i] if pools is not None else None
            h = feature_matrix(nb, scorer, n, pool)
            blocks.append(h)
            triples.append([sentence_counts(gold, extract_edits(nb.source, e.hypothesis))[0] for e in nb.top(n)])
        k = max(len(b) for b in blocks)
        f = blocks[0].shape[1]
        self.h = np.zeros((len(blocks), k, f))
        self.mask = np.zeros((len(blocks), k), dtype=bool)
        self.t = np.zeros((len(blocks), k, 3), dtype=np.int64)
        for i, (b, t) in enumerate(zip(blocks, triples)):
            self.h[i, :len(b)] = b
            self.mask[i, :len(b)] = True
            self.t[i, :len(b)] = t
        self.rows = np.arange(len(blocks))

    def __call__(self, w: np.ndarray) -> float:
        s = _linear_scores(self.h, w)
        s[~self.mask] = -np.inf
        choice = np.argmax(s, axis=1)
        m, p, g = (int(v) for v in self.t[self.rows, choice].sum(axis=0))
        return prf(m, p, g)[2]


def _coordinate_ascent(objective, w: np.ndarray, max_sweeps: int = 10, points: int = 51,
                       min_gain: float = 1e-6) -> Tuple[np.ndarray, float]:
    w = w.copy()
    best = objective(w)
    for _ in range(max_sweeps):
        sweep_start = best
        for f in range(len(w)):
            centre = w[f]
            best_value = centre
            for value in np.linspace(centre - 1.0, centre + 1.0, points):
                w[f] = value
                score = objective(w)
                if score > best:
                    best, best_value = score, value
            w[f] = best_value
        if best - sweep_start < min_gain:
            break
    return w, best


def tune_weights(dev: Sequence[Tuple[NBestList, AnnotatedSentence]], scorer: Optional[Scorer],
                 init: Mapping[str, float], seed: int = 0, n: Optional[int] = None,
                 restarts: int = 3, pools: Optional[Sequence[Pool]] = None) -> Dict[str, float]:
    """Seeded coordinate line search maximising dev-set F0.5 of the reranked
    top-1; the best of the initial point and ``restarts`` perturbed starts wins."""
    if not dev:
        raise ValueError("weight tuning needs a non-empty dev set")
    names = list(dev[0][0].feature_names) + [EDIT_FEATURE]
    for nb, _ in dev:
        _check_schema(nb, {k: 0.0 for k in names})
    objective = _RerankObjective(dev, scorer, n, pools)
    start = np.asarray([float(init.get(k, 0.0)) for k in names])
    rng = np.random.default_rng(seed)
    best_w, best = _coordinate_ascent(objective, start)
    for _ in range(restarts):
        w, value = _coordinate_ascent(objective, start + rng.uniform(-1.0, 1.0, size=len(start)))
        if value > best:
            best_w, best = w, value
    return {k: float(v) for k, v in zip(names, best_w)}


def infer_decoder_weights(lists: Sequence[NBestList]) -> Dict[str, float]:
    """Least-squares fit of the decoder's total score on its features, which
    recovers the decoder's own log-linear weights when the total is linear."""
    names = lists[0].feature_names
    h = np.asarray([[e.decoder_features[k] for k in names] for nb in lists for e in nb.entries])
    y = np.asarray([e.decoder_score for nb in lists for e in nb.entries])
    w, *_ = np.linalg.lstsq(h, y, rcond=None)
    return {k: round(float(v), 6) for k, v in zip(names, w)}


def serialize_weights(weights: Mapping[str, float]) -> str:
    return "".join(f"{k}={float(v)!r}\n" for k, v in weights.items())


def parse_weights(text: str) -> Dict[str, float]:
    weights = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        name, sep, value = line.partition("=")
        if not sep:
            raise ValueError(f"line {lineno}: expected name=value")
        weights[name.strip()] = float(value)
    return weights
