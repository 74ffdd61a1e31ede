# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels: Householder reduction, implicit-shift QL, DBM drift."""

import numpy as np

cimport numpy as cnp
from libc.math cimport fabs, hypot, sqrt

BACKEND = "cython"


def householder_tridiag(double[:, ::1] a):
    """Reduce a symmetric matrix (overwritten) to tridiagonal form.

    Returns (d, e): diagonal and off-diagonal of the similar tridiagonal
    matrix.  Eigenvalues-only variant: the orthogonal factor is discarded.
    """
    cdef Py_ssize_t n = a.shape[0]
    cdef cnp.ndarray[double, ndim=1] d_arr = np.empty(n)
    cdef cnp.ndarray[double, ndim=1] e_arr = np.zeros(n)
    cdef double[::1] d = d_arr
    cdef double[::1] e = e_arr
    cdef Py_ssize_t i, j, k, l
    cdef double scale, h, f, g, hh

    for i in range(n - 1, 0, -1):
        l = i - 1
        h = 0.0
        scale = 0.0
        if l > 0:
            for k in range(l + 1):
                scale += fabs(a[i, k])
            if scale == 0.0:
                e[i] = a[i, l]
            else:
                for k in range(l + 1):
                    a[i, k] /= scale
                    h += a[i, k] * a[i, k]
                f = a[i, l]
                g = -sqrt(h) if f >= 0.0 else sqrt(h)
                e[i] = scale * g
                h -= f * g
                a[i, l] = f - g
                f = 0.0
                for j in range(l + 1):
                    g = 0.0
                    for k in range(j + 1):
                        g += a[j, k] * a[i, k]
                    for k in range(j + 1, l + 1):
                        g += a[k, j] * a[i, k]
                    e[j] = g / h
                    f += e[j] * a[i, j]
                hh = f / (h + h)
                for j in range(l + 1):
                    f = a[i, j]
                    e[j] = g = e[j] - hh * f
                    for k in range(j + 1):
                        a[j, k] -= f * e[k] + g * a[i, k]
        else:
            e[i] = a[i, l]
        d[i] = h
    d[0] = 0.0
    e[0] = 0.0
    for i in range(n):
        d[i] = a[i, i]
    return d_arr, e_arr[1:].copy()


def tridiag_eigenvalues(double[::1] d_in, double[::1] e_in, int max_sweeps=50):
    """Eigenvalues of a symmetric tridiagonal matrix, ascending.

    Implicit-shift QL with Wilkinson shifts, eigenvalues only.  Raises
    RuntimeError if any eigenvalue fails to converge in max_sweeps sweeps.
    """
    cdef Py_ssize_t n = d_in.shape[0]
    cdef cnp.ndarray[double, ndim=1] d_arr = np.array(d_in, dtype=np.float64)
    cdef cnp.ndarray[double, ndim=1] e_arr = np.zeros(n)
    cdef double[::1] d = d_arr
    cdef double[::1] e = e_arr
    cdef Py_ssize_t i, l, m, iteration
    cdef double dd, g, r, s, c, p, f, b

    for i in range(n - 1):
        e[i] = e_in[i]
    e[n - 1] = 0.0

    for l in range(n):
        iteration = 0
        while True:
            m = l
            while m < n - 1:
                dd = fabs(d[m]) + fabs(d[m + 1])
                if fabs(e[m]) <= 2.220446049250313e-16 * dd:
                    break
                m += 1
            if m == l:
                break
            iteration += 1
            if iteration > max_sweeps:
                raise RuntimeError(
                    "QL iteration failed to converge for eigenvalue %d" % l
                )
            g = (d[l + 1] - d[l]) / (2.0 * e[l])
            r = hypot(g, 1.0)
            g = d[m] - d[l] + e[l] / (g + (r if g >= 0.0 else -r))
            s = 1.0
            c = 1.0
            p = 0.0
            for i in range(m - 1, l - 1, -1):
                f = s * e[i]
                b = c * e[i]
                r = hypot(f, g)
                e[i + 1] = r
                if r == 0.0:
                    d[i + 1] -= p
                    e[m] = 0.0
                    break
                s = f / r
                c = g / r
                g = d[i + 1] - p
                r = (d[i] - g) * s + 2.0 * c * b
                p = s * r
                d[i + 1] = g + p
                g = c * r - b
            else:
                d[l] -= p
                e[l] = g
                e[m] = 0.0
    d_arr.sort()
    return d_arr


cdef void _pairwise_rows(double[:, ::1] x, double[:, ::1] out,
                         double[::1] buf) noexcept nogil:
    cdef Py_ssize_t k = x.shape[0]
    cdef Py_ssize_t n = x.shape[1]
    cdef Py_ssize_t r, i, j, m
    cdef double xi, s
    for r in range(k):
        for i in range(n):
            out[r, i] = 0.0
        for i in range(n - 1):
            xi = x[r, i]
            m = n - 1 - i
            # row buffer keeps the divide loop elementwise so it vectorizes
            for j in range(m):
                buf[j] = 1.0 / (xi - x[r, i + 1 + j])
            s = 0.0
            for j in range(m):
                s += buf[j]
            out[r, i] += s
            for j in range(m):
                out[r, i + 1 + j] -= buf[j]


def pairwise_inverse_sum(x):
    """out[i] = sum_{j != i} 1/(x[i]-x[j]), the DBM interaction term.

    Accepts a position vector or a (k, n) stack of position vectors; the
    stacked form computes every row in one call.
    """
    arr = np.ascontiguousarray(x, dtype=np.float64)
    flat = arr.ndim == 1
    if flat:
        arr = arr[None, :]
    cdef cnp.ndarray[double, ndim=2] out_arr = np.empty_like(arr)
    cdef cnp.ndarray[double, ndim=1] buf = np.empty(arr.shape[1])
    _pairwise_rows(arr, out_arr, buf)
    return out_arr[0] if flat else out_arr
