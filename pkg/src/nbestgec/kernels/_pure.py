"""Pure-Python twins of the compiled kernels in ``_core.pyx``.

Kept deliberately loop-for-loop identical to the Cython code so both backends
return bit-identical floats and identical alignments.
"""

MAX_NEWTON = 60


def align_ops(a, b):
    n = len(a)
    m = len(b)
    d = [[0] * (m + 1) for _ in range(n + 1)]
    for j in range(m + 1):
        d[0][j] = j
    for i in range(1, n + 1):
        row = d[i]
        prev = d[i - 1]
        row[0] = i
        ai = a[i - 1]
        for j in range(1, m + 1):
            best = prev[j - 1] + (0 if ai == b[j - 1] else 1)
            c = prev[j] + 1
            if c < best:
                best = c
            c = row[j - 1] + 1
            if c < best:
                best = c
            row[j] = best

    ops = []
    i, j = n, m
    while i > 0 or j > 0:
        if i > 0 and j > 0 and a[i - 1] == b[j - 1] and d[i - 1][j - 1] == d[i][j]:
            ops.append("M")
            i -= 1
            j -= 1
        elif i > 0 and j > 0 and a[i - 1] != b[j - 1] and d[i - 1][j - 1] + 1 == d[i][j]:
            ops.append("S")
            i -= 1
            j -= 1
        elif i > 0 and d[i - 1][j] + 1 == d[i][j]:
            ops.append("D")
            i -= 1
        else:
            ops.append("I")
            j -= 1
    return "".join(reversed(ops))


def sparse_dot(w, idx, val):
    total = 0.0
    for k in range(len(idx)):
        total += float(w[idx[k]]) * float(val[k])
    return total


def cw_update(mu, sigma, idx, val, y, phi):
    """Diagonal-variance CW step in place; returns the step size alpha.

    alpha is the root of ``m + alpha*v = phi * sum(s / (1 + 2*alpha*phi*s))``
    with ``s = sigma_i * x_i**2``, so the updated model meets the margin
    constraint exactly. Newton's method from 0 climbs to it monotonically
    because the residual is increasing and concave in alpha.
    """
    m = 0.0
    v = 0.0
    for k in range(len(idx)):
        i = idx[k]
        x = float(val[k])
        m += float(mu[i]) * x
        v += float(sigma[i]) * x * x
    m = y * m
    if v == 0.0 or m >= phi * v:
        return 0.0
    alpha = 0.0
    for _ in range(MAX_NEWTON):
        shrunk = 0.0
        slope = 0.0
        for k in range(len(idx)):
            x = float(val[k])
            s = float(sigma[idx[k]]) * x * x
            d = 1.0 + 2.0 * alpha * phi * s
            shrunk += s / d
            slope += s * s / (d * d)
        step = (m + alpha * v - phi * shrunk) / (v + 2.0 * phi * phi * slope)
        alpha -= step
        if -step <= 1e-15 * alpha:
            break
    if alpha <= 0.0:
        return 0.0
    for k in range(len(idx)):
        i = idx[k]
        x = float(val[k])
        if x == 0.0:
            continue
        mu[i] = float(mu[i]) + alpha * y * float(sigma[i]) * x
        sigma[i] = 1.0 / (1.0 / float(sigma[i]) + 2.0 * alpha * phi * x * x)
    return alpha
