# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled inner loops: token alignment and sparse confidence-weighted updates.

Every function here has a line-for-line twin in ``_pure.py``; both must
produce bit-identical results (same operation order, no fast-math).
"""

from libc.stdlib cimport malloc, free

cdef enum:
    MAX_NEWTON = 60


def align_ops(const int[::1] a, const int[::1] b):
    """Return the unit-cost alignment of ``a`` onto ``b`` as a string of
    ``M`` (match), ``S`` (substitute), ``D`` (delete) and ``I`` (insert).

    Backtrace prefers match > substitution > deletion > insertion.
    """
    cdef Py_ssize_t n = a.shape[0]
    cdef Py_ssize_t m = b.shape[0]
    cdef Py_ssize_t w = m + 1
    cdef Py_ssize_t i, j, k
    cdef int best, c
    cdef int *d = <int *> malloc((n + 1) * (m + 1) * sizeof(int))
    cdef char *ops = <char *> malloc(n + m + 1)
    if d == NULL or ops == NULL:
        free(d)
        free(ops)
        raise MemoryError()
    try:
        for j in range(m + 1):
            d[j] = <int> j
        for i in range(1, n + 1):
            d[i * w] = <int> i
            for j in range(1, m + 1):
                best = d[(i - 1) * w + j - 1] + (0 if a[i - 1] == b[j - 1] else 1)
                c = d[(i - 1) * w + j] + 1
                if c < best:
                    best = c
                c = d[i * w + j - 1] + 1
                if c < best:
                    best = c
                d[i * w + j] = best

        i = n
        j = m
        k = 0
        while i > 0 or j > 0:
            if i > 0 and j > 0 and a[i - 1] == b[j - 1] and d[(i - 1) * w + j - 1] == d[i * w + j]:
                ops[k] = b'M'
                i -= 1
                j -= 1
            elif i > 0 and j > 0 and a[i - 1] != b[j - 1] and d[(i - 1) * w + j - 1] + 1 == d[i * w + j]:
                ops[k] = b'S'
                i -= 1
                j -= 1
            elif i > 0 and d[(i - 1) * w + j] + 1 == d[i * w + j]:
                ops[k] = b'D'
                i -= 1
            else:
                ops[k] = b'I'
                j -= 1
            k += 1
        return ops[:k].decode('ascii')[::-1]
    finally:
        free(d)
        free(ops)


def sparse_dot(const double[::1] w, const int[::1] idx, const double[::1] val):
    cdef Py_ssize_t k
    cdef double total = 0.0
    for k in range(idx.shape[0]):
        total += w[idx[k]] * val[k]
    return total


def cw_update(double[::1] mu, double[::1] sigma, const int[::1] idx,
              const double[::1] val, double y, double phi):
    """Diagonal-variance CW step in place; returns the step size alpha."""
    cdef Py_ssize_t k
    cdef int i, it
    cdef double m = 0.0
    cdef double v = 0.0
    cdef double x, s, d, shrunk, slope, step
    cdef double alpha = 0.0
    for k in range(idx.shape[0]):
        i = idx[k]
        x = val[k]
        m += mu[i] * x
        v += sigma[i] * x * x
    m = y * m
    if v == 0.0 or m >= phi * v:
        return 0.0
    for it in range(MAX_NEWTON):
        shrunk = 0.0
        slope = 0.0
        for k in range(idx.shape[0]):
            x = val[k]
            s = sigma[idx[k]] * x * x
            d = 1.0 + 2.0 * alpha * phi * s
            shrunk += s / d
            slope += s * s / (d * d)
        step = (m + alpha * v - phi * shrunk) / (v + 2.0 * phi * phi * slope)
        alpha -= step
        if -step <= 1e-15 * alpha:
            break
    if alpha <= 0.0:
        return 0.0
    for k in range(idx.shape[0]):
        i = idx[k]
        x = val[k]
        if x == 0.0:
            continue
        mu[i] += alpha * y * sigma[i] * x
        sigma[i] = 1.0 / (1.0 / sigma[i] + 2.0 * alpha * phi * x * x)
    return alpha
