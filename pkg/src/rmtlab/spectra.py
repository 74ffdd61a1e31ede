"""Symmetric eigensolver pipeline: dense -> tridiagonal -> eigenvalues.

The production path is the Householder + implicit-shift QL pair from the
kernel backend (compiled when available).  Sturm-sequence bisection is kept
here purely as an independent oracle for tests; it never runs in the
production path.
"""
import math
from dataclasses import dataclass, field

import numpy as np

from rmtlab import _kernels
from rmtlab.errors import DomainError, NumericError

_EPS = np.finfo(float).eps


@dataclass(frozen=True)
class TridiagonalMatrix:
    diag: np.ndarray
    offdiag: np.ndarray

    def __post_init__(self):
        if len(self.offdiag) != len(self.diag) - 1:
            raise DomainError("offdiag must have length n - 1")

    @property
    def n(self):
        return len(self.diag)

    def trace(self):
        return float(np.sum(self.diag))


@dataclass(frozen=True)
class Spectrum:
    """Sorted eigenvalues plus where they came from."""

    values: np.ndarray
    provenance: str = ""

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if np.any(np.diff(v) < 0.0):
            raise DomainError("eigenvalues must be sorted ascending")
        object.__setattr__(self, "values", v)

    @property
    def n(self):
        return len(self.values)


def householder_tridiagonalize(m):
    """Orthogonal reduction of a symmetric matrix to tridiagonal form.

    The input is copied; only eigenvalue information survives (the
    orthogonal factor is discarded).
    """
    a = np.array(m, dtype=float, order="C", copy=True)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DomainError("square matrix required")
    if a.shape[0] == 1:
        return TridiagonalMatrix(diag=a.diagonal().copy(), offdiag=np.zeros(0))
    d, e = _kernels.householder_tridiag(a)
    return TridiagonalMatrix(diag=np.asarray(d), offdiag=np.asarray(e))


def eigen_tridiagonal(t, provenance=""):
    """All eigenvalues of a tridiagonal matrix by implicit-shift QL."""
    if t.n == 1:
        return Spectrum(values=np.array([t.diag[0]]), provenance=provenance)
    try:
        vals = _kernels.tridiag_eigenvalues(
            np.ascontiguousarray(t.diag, dtype=float),
            np.ascontiguousarray(t.offdiag, dtype=float),
        )
    except RuntimeError as exc:
        raise NumericError(str(exc)) from exc
    return Spectrum(values=np.asarray(vals), provenance=provenance)


def eigen_symmetric(m, provenance=""):
    return eigen_tridiagonal(householder_tridiagonalize(m), provenance)


def sturm_count(t, x):
    """Number of eigenvalues strictly below x, via Sturm sign changes."""
    d = np.asarray(t.diag, dtype=float)
    e = np.asarray(t.offdiag, dtype=float)
    count = 0
    q = d[0] - x
    if q < 0.0:
        count += 1
    for i in range(1, len(d)):
        if q == 0.0:
            q = _EPS * (abs(e[i - 1]) + _EPS)
        q = d[i] - x - e[i - 1] * e[i - 1] / q
        if q < 0.0:
            count += 1
    return count


def sturm_bisection_eigenvalues(t, tol=1e-12):
    """Test oracle: every eigenvalue by bisection on the Sturm count.

    Deliberately independent of the QL path; slow and only used to
    cross-check the production solver.
    """
    d = np.asarray(t.diag, dtype=float)
    e = np.asarray(t.offdiag, dtype=float)
    n = len(d)
    radius = np.zeros(n)
    radius[:-1] += np.abs(e)
    radius[1:] += np.abs(e)
    lo_all = float(np.min(d - radius)) - tol
    hi_all = float(np.max(d + radius)) + tol
    out = np.empty(n)
    for k in range(n):
        lo, hi = lo_all, hi_all
        while hi - lo > tol * max(1.0, abs(lo), abs(hi)):
            mid = 0.5 * (lo + hi)
            if sturm_count(t, mid) >= k + 1:
                hi = mid
            else:
                lo = mid
        out[k] = 0.5 * (lo + hi)
    return out


def empirical_stieltjes(s, z):
    """m_N(z) = (1/N) sum 1/(lambda_j - z)."""
    if complex(z).imag == 0.0:
        raise DomainError("Im z != 0 required")
    return complex(np.mean(1.0 / (s.values - complex(z))))


def rigidity_residual(s):
    """max_i |lambda_i - gamma_i| N^{2/3} min(i, N+1-i)^{1/3}, a diagnostic."""
    from rmtlab import semicircle

    n = s.n
    gamma = semicircle.classical_locations(n)
    i = np.arange(1, n + 1)
    weight = n ** (2.0 / 3.0) * np.minimum(i, n + 1 - i) ** (1.0 / 3.0)
    return float(np.max(np.abs(s.values - gamma) * weight))
