"""Closed-form semicircle law: density, CDF, quantiles and Stieltjes transform.

All functions accept scalars or numpy arrays and are pure; the quantile
table for a given dimension is computed once and cached.
"""
import functools
import math

import numpy as np

from rmtlab.errors import DomainError, SingularityError

SUPPORT = (-2.0, 2.0)


def density(x):
    """Semicircle density (1/2pi) sqrt((4-x^2)_+), zero off [-2, 2]."""
    x = np.asarray(x, dtype=float)
    val = np.sqrt(np.clip(4.0 - x * x, 0.0, None)) / (2.0 * np.pi)
    return val if val.ndim else float(val)


def cdf(x):
    """Distribution function of the semicircle law (analytic antiderivative)."""
    x = np.asarray(x, dtype=float)
    xc = np.clip(x, -2.0, 2.0)
    val = 0.5 + xc * np.sqrt(4.0 - xc * xc) / (4.0 * np.pi) + np.arcsin(xc / 2.0) / np.pi
    val = np.clip(val, 0.0, 1.0)
    return val if val.ndim else float(val)


def quantile(u):
    """Inverse CDF on (0, 1).

    Safeguarded Newton with a bisection bracket; pure Newton stalls near the
    edges where the density derivative blows up.
    """
    u_arr = np.atleast_1d(np.asarray(u, dtype=float))
    if np.any(u_arr <= 0.0) or np.any(u_arr >= 1.0):
        raise DomainError("quantile requires u in (0, 1)")
    lo = np.full_like(u_arr, -2.0)
    hi = np.full_like(u_arr, 2.0)
    # start from the arcsine-law approximation, good in the bulk
    x = 2.0 * np.sin(np.pi * (u_arr - 0.5))
    for _ in range(50):
        fx = cdf(x) - u_arr
        hi = np.where(fx >= 0.0, np.minimum(hi, x), hi)
        lo = np.where(fx < 0.0, np.maximum(lo, x), lo)
        with np.errstate(divide="ignore", invalid="ignore"):
            step = fx / density(x)
        x_new = x - step
        bad = ~np.isfinite(x_new) | (x_new <= lo) | (x_new >= hi)
        x = np.where(bad, 0.5 * (lo + hi), x_new)
        if np.max(hi - lo) < 1e-14 and np.max(np.abs(fx)) < 1e-13:
            break
    return x if np.asarray(u).ndim else float(x[0])


@functools.lru_cache(maxsize=64)
def classical_locations(n: int):
    """Table of the N-quantiles gamma_i = quantile(i/N), i = 1..N.

    gamma_N sits at the upper edge 2.  Cached and returned read-only;
    recomputation is bit-identical because quantile is deterministic.
    """
    if n < 1:
        raise DomainError("need n >= 1")
    u = np.arange(1, n + 1) / n
    gamma = np.empty(n)
    gamma[: n - 1] = quantile(u[: n - 1])
    gamma[n - 1] = 2.0
    gamma.setflags(write=False)
    return gamma


def stieltjes(z):
    """Stieltjes transform m(z) = (-z + sqrt(z^2 - 4))/2, Im z != 0.

    The square-root branch is fixed by Im m(z) * Im z > 0, which also gives
    m(z) -> 0 at infinity.
    """
    z = np.asarray(z, dtype=complex)
    if np.any(z.imag == 0.0):
        raise DomainError("stieltjes requires Im z != 0")
    root = np.sqrt(z * z - 4.0)
    m = (-z + root) / 2.0
    flip = m.imag * z.imag <= 0.0
    m = np.where(flip, (-z - root) / 2.0, m)
    return m if m.ndim else complex(m)


def stieltjes_derivative(z):
    """m'(z) = m(z)^2 / (1 - m(z)^2)."""
    m = np.asarray(stieltjes(z))
    denom = 1.0 - m * m
    if np.any(np.abs(denom) < 1e-12):
        raise SingularityError("m(z)^2 = 1: derivative singular at the spectral edge")
    out = m * m / denom
    return out if out.ndim else complex(out)
