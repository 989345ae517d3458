"""Confidence-weighted linear classifier with a diagonal covariance.

Each update takes the smallest step on the Gaussian over weights after
which the example is classified correctly with probability ``eta``, i.e.
``y * mu.x >= phi * x.Sigma.x`` with ``phi`` the standard-normal quantile of
``eta``. The step size is the exact root of that constraint under the
diagonal covariance update; for a single touched coordinate with
``sigma * x**2 == 1`` it equals the familiar closed form.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from statistics import NormalDist
from typing import Callable, Iterable, Optional, Sequence, Tuple

import numpy as np

from . import kernels
from .features import SparseVector

THRESHOLD_GRID = tuple(round(-0.5 + 0.01 * i, 2) for i in range(101))


def confidence_quantile(eta: float) -> float:
    if not 0.5 < eta < 1.0:
        raise ValueError(f"eta must lie in (0.5, 1), got {eta}")
    return NormalDist().inv_cdf(eta)


@dataclass
class CWTrainConfig:
    epochs: int = 5
    eta: float = 0.9
    initial_variance: float = 1.0
    shuffle_seed: int = 0

    def __post_init__(self):
        if self.epochs < 1:
            raise ValueError("epochs must be >= 1")
        if self.initial_variance <= 0:
            raise ValueError("initial variance must be positive")
        confidence_quantile(self.eta)


class CWModel:
    def __init__(self, dim: int, eta: float = 0.9, initial_variance: float = 1.0, tau: float = 0.0):
        self.eta = eta
        self.phi = confidence_quantile(eta)
        self.initial_variance = initial_variance
        self.tau = tau
        self.mu = np.zeros(dim, dtype=np.float64)
        self.sigma = np.full(dim, initial_variance, dtype=np.float64)

    @property
    def dim(self) -> int:
        return self.mu.shape[0]

    def copy(self) -> "CWModel":
        other = CWModel(self.dim, self.eta, self.initial_variance, self.tau)
        other.mu[:] = self.mu
        other.sigma[:] = self.sigma
        return other

    def update(self, x: SparseVector, y: int) -> float:
        """One in-place CW step on example ``x`` with label ``y`` in {-1, +1};
        returns the step size (0 when the margin constraint already holds)."""
        return kernels.cw_update(self.mu, self.sigma, x.indices, x.values, float(y), self.phi)

    def score(self, x: SparseVector) -> float:
        return kernels.sparse_dot(self.mu, x.indices, x.values)

    def classify(self, x: SparseVector) -> bool:
        return self.score(x) >= self.tau


def cw_update(model: CWModel, x: SparseVector, y: int) -> CWModel:
    model.update(x, y)
    return model


def score(model: CWModel, x: SparseVector) -> float:
    return model.score(x)


def classify(model: CWModel, x: SparseVector) -> bool:
    return model.classify(x)


def cw_train(
    examples: Sequence[Tuple[SparseVector, bool]],
    dim: int,
    cfg: Optional[CWTrainConfig] = None,
) -> CWModel:
    """Online training; every epoch visits the examples in an order shuffled
    by ``random.Random(shuffle_seed + epoch)``."""
    cfg = cfg or CWTrainConfig()
    if not examples:
        raise ValueError("cannot train on an empty example set")
    model = CWModel(dim, cfg.eta, cfg.initial_variance)
    order = list(range(len(examples)))
    for epoch in range(cfg.epochs):
        random.Random(cfg.shuffle_seed + epoch).shuffle(order)
        for i in order:
            x, valid = examples[i]
            model.update(x, 1 if valid else -1)
    return model


def accuracy(model: CWModel, examples: Sequence[Tuple[SparseVector, bool]], tau: float = 0.0) -> float:
    """Fraction of examples whose decision at ``tau`` matches the label."""
    if not examples:
        raise ValueError("accuracy of an empty example set is undefined")
    hits = sum((model.score(x) >= tau) == valid for x, valid in examples)
    return hits / len(examples)


def tune_threshold(objective: Callable[[float], float], grid: Iterable[float] = THRESHOLD_GRID) -> float:
    """Grid value maximising ``objective``; ties go to the smallest value."""
    best_tau, best = None, -1.0
    for tau in sorted(grid):
        value = objective(tau)
        if value > best:
            best_tau, best = tau, value
    return best_tau


# ---------------------------------------------------------------------------
# model files


def serialize_model(model: CWModel) -> str:
    lines = [
        f"cw eta {model.eta!r} phi {model.phi!r} tau {model.tau!r} dim {model.dim} "
        f"init {model.initial_variance!r}\n"
    ]
    for i in range(model.dim):
        mu, sigma = float(model.mu[i]), float(model.sigma[i])
        if mu != 0.0 or sigma != model.initial_variance:
            lines.append(f"{i} {mu!r} {sigma!r}\n")
    return "".join(lines)


def parse_model(text: str) -> CWModel:
    lines = text.splitlines()
    head = lines[0].split() if lines else []
    if len(head) not in (9, 11) or head[0] != "cw" or head[1:9:2] != ["eta", "phi", "tau", "dim"]:
        raise ValueError("line 1: expected 'cw eta <v> phi <v> tau <v> dim <n>'")
    init = float(head[10]) if len(head) == 11 else 1.0
    model = CWModel(int(head[8]), float(head[2]), init, float(head[6]))
    for lineno, line in enumerate(lines[1:], start=2):
        parts = line.split()
        if len(parts) != 3:
            raise ValueError(f"line {lineno}: expected '<id> <mu> <sigma>'")
        i = int(parts[0])
        model.mu[i] = float(parts[1])
        model.sigma[i] = float(parts[2])
    return model

