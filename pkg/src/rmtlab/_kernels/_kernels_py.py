"""Pure-Python (numpy) fallback for the compiled kernels.

Same contracts and bit-for-bit comparable algorithms as _kernels_cy, chosen
at import time by rmtlab._kernels.  Householder is vectorized over rows; the
QL sweep is a scalar loop and is the slow path here.
"""
import math

import numpy as np

BACKEND = "python"

_EPS = 2.220446049250313e-16


def householder_tridiag(a):
    """Reduce a symmetric matrix (overwritten) to tridiagonal (d, e)."""
    a = np.asarray(a)
    n = a.shape[0]
    e = np.zeros(n)
    for i in range(n - 1, 0, -1):
        l = i - 1
        if l > 0:
            row = a[i, : l + 1]
            scale = np.abs(row).sum()
            if scale == 0.0:
                e[i] = a[i, l]
                continue
            row /= scale
            h = row @ row
            f = row[l]
            g = -math.sqrt(h) if f >= 0.0 else math.sqrt(h)
            e[i] = scale * g
            h -= f * g
            row[l] = f - g
            block = a[: l + 1, : l + 1]
            sym = np.tril(block) + np.tril(block, -1).T
            p = (sym @ row) / h
            k = (p @ row) / (2.0 * h)
            q = p - k * row
            block -= np.tril(np.outer(q, row) + np.outer(row, q))
        else:
            e[i] = a[i, l]
    d = np.diagonal(a).copy()
    return d, e[1:].copy()


def tridiag_eigenvalues(d_in, e_in, max_sweeps=50):
    """Implicit-shift QL eigenvalues of a tridiagonal matrix, ascending."""
    n = len(d_in)
    d = np.array(d_in, dtype=float)
    e = np.zeros(n)
    e[: n - 1] = e_in
    for l in range(n):
        iteration = 0
        while True:
            m = l
            while m < n - 1:
                if abs(e[m]) <= _EPS * (abs(d[m]) + abs(d[m + 1])):
                    break
                m += 1
            if m == l:
                break
            iteration += 1
            if iteration > max_sweeps:
                raise RuntimeError(
                    f"QL iteration failed to converge for eigenvalue {l}"
                )
            g = (d[l + 1] - d[l]) / (2.0 * e[l])
            r = math.hypot(g, 1.0)
            g = d[m] - d[l] + e[l] / (g + (r if g >= 0.0 else -r))
            s = c = 1.0
            p = 0.0
            broke = False
            for i in range(m - 1, l - 1, -1):
                f = s * e[i]
                b = c * e[i]
                r = math.hypot(f, g)
                e[i + 1] = r
                if r == 0.0:
                    d[i + 1] -= p
                    e[m] = 0.0
                    broke = True
                    break
                s = f / r
                c = g / r
                g = d[i + 1] - p
                r = (d[i] - g) * s + 2.0 * c * b
                p = s * r
                d[i + 1] = g + p
                g = c * r - b
            if not broke:
                d[l] -= p
                e[l] = g
                e[m] = 0.0
    d.sort()
    return d


def pairwise_inverse_sum(x):
    """out[i] = sum_{j != i} 1/(x[i]-x[j]) via an outer-difference table.

    Accepts a position vector or a (k, n) stack of position vectors.
    """
    x = np.asarray(x, dtype=float)
    flat = x.ndim == 1
    if flat:
        x = x[None, :]
    diff = x[:, :, None] - x[:, None, :]
    k, n = x.shape
    diff[:, np.arange(n), np.arange(n)] = np.inf
    out = (1.0 / diff).sum(axis=2)
    return out[0] if flat else out
