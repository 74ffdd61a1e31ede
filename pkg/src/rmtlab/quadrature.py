"""Gauss-Legendre quadrature with substitutions for endpoint singularities.

Integrals against the semicircle-type weight 1/sqrt(4-x^2) are computed
after the substitution x = 2 sin(theta), which absorbs the weight into the
Jacobian and leaves a bounded integrand.  Every adaptive routine doubles the
node count until two successive levels agree and returns the disagreement
alongside the value.
"""
import functools
import math

import numpy as np

from rmtlab.errors import NumericError

RTOL = 1e-6
ATOL = 1e-10  # floor for integrals that are zero up to roundoff


@functools.lru_cache(maxsize=64)
def _nodes(n):
    x, w = np.polynomial.legendre.leggauss(n)
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def fixed_quad(f, a, b, n):
    """Gauss-Legendre rule with n nodes on [a, b]; f must be vectorized."""
    x, w = _nodes(n)
    half = 0.5 * (b - a)
    return half * float(w @ np.asarray(f(0.5 * (a + b) + half * x), dtype=float))


def _split(a, b, breaks):
    pts = [a] + sorted(p for p in breaks if a < p < b) + [b]
    return list(zip(pts[:-1], pts[1:]))


def adaptive_quad(f, a, b, n0=512, rtol=RTOL, atol=ATOL, max_doublings=3,
                  breaks=()):
    """Integrate f over [a, b], doubling nodes until convergence.

    breaks lists interior points where the integrand is kinked; each panel
    gets its own rule.  Returns (value, disagreement); raises NumericError
    when doubling never brings successive levels within tolerance.
    """
    panels = _split(a, b, breaks)
    prev = None
    n = n0
    for _ in range(max_doublings + 1):
        val = math.fsum(fixed_quad(f, lo, hi, n) for lo, hi in panels)
        if prev is not None:
            dis = abs(val - prev)
            if dis <= max(rtol * abs(val), atol):
                return val, dis
        prev = val
        n *= 2
    raise NumericError(
        f"quadrature did not converge on [{a}, {b}]: last disagreement {dis:.3e}"
    )


def weighted_quad(g, lo=-2.0, hi=2.0, breaks=(), **kw):
    """Integral of g(x)/sqrt(4-x^2) over [lo, hi] via x = 2 sin(theta)."""
    tlo = math.asin(max(-1.0, lo / 2.0))
    thi = math.asin(min(1.0, hi / 2.0))
    tb = tuple(math.asin(b / 2.0) for b in breaks if lo < b < hi)
    return adaptive_quad(lambda t: g(2.0 * np.sin(t)), tlo, thi, breaks=tb, **kw)


def difference_quotient_sq(f, fprime, cut=1e-7):
    """((f(x)-f(y))/(x-y))^2 extended continuously to the diagonal.

    Below the cut the quotient is replaced by f'((x+y)/2); quadrature nodes
    rarely land that close, so this is a guard, not a bias.
    """

    def q(x, y):
        d = x - y
        with np.errstate(divide="ignore", invalid="ignore"):
            r = (f(x) - f(y)) / d
        near = np.abs(d) <= cut
        if np.any(near):
            r = np.where(near, fprime(0.5 * (x + y)), r)
        return r * r

    return q


def _tensor_panels(a, b, breaks, n):
    """Nodes/weights for a panelled 1D rule, concatenated."""
    xs, ws = [], []
    gx, gw = _nodes(n)
    for lo, hi in _split(a, b, breaks):
        half = 0.5 * (hi - lo)
        xs.append(0.5 * (lo + hi) + half * gx)
        ws.append(half * gw)
    return np.concatenate(xs), np.concatenate(ws)


def weighted_double_quad(q, n0=256, rtol=RTOL, atol=ATOL, max_doublings=3,
                         breaks=()):
    """Integral over [-2,2]^2 of q(x,y)/(sqrt(4-x^2) sqrt(4-y^2)).

    Both axes are theta-substituted; q is evaluated on the tensor grid.
    Returns (value, disagreement).
    """
    tb = tuple(math.asin(b / 2.0) for b in breaks if -2.0 < b < 2.0)
    prev = None
    n = n0
    for _ in range(max_doublings + 1):
        t, w = _tensor_panels(-math.pi / 2.0, math.pi / 2.0, tb, n)
        x = 2.0 * np.sin(t)
        val = float(w @ q(x[:, None], x[None, :]) @ w)
        if prev is not None:
            dis = abs(val - prev)
            if dis <= max(rtol * abs(val), atol):
                return val, dis
        prev = val
        n *= 2
    raise NumericError(
        f"2D quadrature did not converge: last disagreement {dis:.3e}"
    )


def plane_double_quad(q, radius, n, breaks=()):
    """Fixed-level tensor rule for q over [-radius, radius]^2."""
    x, w = _tensor_panels(-radius, radius, breaks, n)
    return float(w @ q(x[:, None], x[None, :]) @ w)
