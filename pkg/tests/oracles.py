"""Independent reference implementations used only by the tests.

Each oracle re-derives a result by a different route from the production
code: exhaustive recursion instead of dynamic programming, slot sets
instead of interval arithmetic, dense loops instead of sparse kernels.
"""

import math
from functools import lru_cache


def levenshtein(a, b):
    """Unit-cost token edit distance by memoised recursion."""
    a, b = tuple(a), tuple(b)

    @lru_cache(maxsize=None)
    def d(i, j):
        if i == len(a):
            return len(b) - j
        if j == len(b):
            return len(a) - i
        if a[i] == b[j]:
            return d(i + 1, j + 1)
        return 1 + min(d(i + 1, j + 1), d(i + 1, j), d(i, j + 1))

    return d(0, 0)


def slots(start, end):
    """Cells an edit occupies on a line where token i is cell 2i+1 and the
    gap before token i is cell 2i. An insertion occupies only its gap; a
    span occupies its tokens and the gaps strictly inside it."""
    if start == end:
        return {2 * start}
    return {2 * i + 1 for i in range(start, end)} | {2 * i for i in range(start + 1, end)}


def conflict(a, b):
    return bool(slots(a.start, a.end) & slots(b.start, b.end))


def greedy_oracle(pool, tau):
    """Repeatedly take the best remaining edit that fits; stop when none fits."""
    remaining = [e for e in pool if e.score >= tau]
    chosen = []
    while True:
        fits = [e for e in remaining if not any(conflict(e, c) for c in chosen)]
        if not fits:
            break
        best = fits[0]
        for e in fits[1:]:
            if e.score > best.score:
                best = e
            elif e.score == best.score:
                ka = (e.start, e.hyp_rank, e.replacement, e.end)
                kb = (best.start, best.hyp_rank, best.replacement, best.end)
                if ka < kb:
                    best = e
        chosen.append(best)
        remaining.remove(best)
    return sorted(chosen, key=lambda e: (e.start, e.end))


def cw_dense(mu, sigma, x, y, phi):
    """Variance-form CW step on dense lists; returns (mu', sigma', alpha).

    alpha is found by bisection on the post-update margin constraint
    ``m + alpha*v = phi * sum(sigma_i x_i^2 / (1 + 2 alpha phi sigma_i x_i^2))``.
    """
    m = y * sum(mi * xi for mi, xi in zip(mu, x))
    s = [si * xi * xi for si, xi in zip(sigma, x)]
    v = sum(s)
    if v == 0 or m >= phi * v:
        return list(mu), list(sigma), 0.0

    def gap(a):
        return m + a * v - phi * sum(t / (1 + 2 * a * phi * t) for t in s)

    lo, hi = 0.0, 1.0
    while gap(hi) < 0:
        hi *= 2
    for _ in range(200):
        mid = (lo + hi) / 2
        if gap(mid) < 0:
            lo = mid
        else:
            hi = mid
    alpha = (lo + hi) / 2
    new_mu = [mi + alpha * y * si * xi for mi, si, xi in zip(mu, sigma, x)]
    new_sigma = [1.0 / (1.0 / si + 2.0 * alpha * phi * xi * xi) if xi else si for si, xi in zip(sigma, x)]
    return new_mu, new_sigma, alpha


def f_half(p, r):
    """F0.5 written out as (1.25 * P * R) / (0.25 * P + R)."""
    denominator = 0.25 * p + r
    return 0.0 if denominator == 0 else 1.25 * p * r / denominator
