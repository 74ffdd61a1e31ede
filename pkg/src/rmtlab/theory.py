"""Predictors for the limiting means and variances of spectral statistics.

Closed forms are plain arithmetic; everything quadrature-backed carries a
refinement-disagreement estimate in its breakdown.
"""
import math
from dataclasses import dataclass

import numpy as np

from rmtlab import quadrature, semicircle
from rmtlab.errors import DomainError


def _fn(f):
    """Accept a TestFunction-like object or a (callable, derivative) pair."""
    if hasattr(f, "evaluate"):
        return f.evaluate, f.derivative, tuple(getattr(f, "panel_breaks", ()))
    if isinstance(f, tuple):
        return f[0], f[1], ()
    raise TypeError("expected a test function or (f, f') pair")


@dataclass(frozen=True)
class VarianceBreakdown:
    double_integral_term: float
    a2_term: float
    s4_term: float
    disagreement: float

    @property
    def total(self):
        return self.double_integral_term + self.a2_term + self.s4_term


@dataclass(frozen=True)
class MeanBreakdown:
    leading: float
    arcsine_term: float
    edge_term: float
    a2_term: float
    s4_term: float
    disagreement: float

    @property
    def total(self):
        return (self.leading + self.arcsine_term + self.edge_term
                + self.a2_term + self.s4_term)


def variance_functional(f, s4, a2):
    """Limiting variance of a centered linear statistic sum f(lambda_j).

    Three pieces: a weighted double integral of the squared difference
    quotient, plus rank-one corrections carrying the diagonal-variance
    excess (a2 - 1) and the off-diagonal fourth cumulant s4.
    """
    fe, fd, breaks = _fn(f)
    q = quadrature.difference_quotient_sq(fe, fd)
    dbl, dis1 = quadrature.weighted_double_quad(
        lambda x, y: q(x, y) * (4.0 - x * y), breaks=breaks
    )
    ix, dis2 = quadrature.weighted_quad(lambda x: fe(x) * x, breaks=breaks)
    i2, dis3 = quadrature.weighted_quad(
        lambda x: fe(x) * (2.0 - x * x), breaks=breaks
    )
    pi2 = math.pi ** 2
    return VarianceBreakdown(
        double_integral_term=dbl / (2.0 * pi2),
        a2_term=(a2 - 1.0) / (4.0 * pi2) * ix * ix,
        s4_term=s4 / (2.0 * pi2) * i2 * i2,
        disagreement=max(dis1, dis2, dis3),
    )


def mean_expansion(f, s4, a2, n):
    """Five-term expansion of E[sum f(lambda_j)] through order one."""
    fe, _, breaks = _fn(f)
    lead, d1 = quadrature.weighted_quad(
        lambda x: fe(x) * (4.0 - x * x), breaks=breaks
    )
    arc, d2 = quadrature.weighted_quad(fe, breaks=breaks)
    i2, d3 = quadrature.weighted_quad(
        lambda x: fe(x) * (2.0 - x * x), breaks=breaks
    )
    i4, d4 = quadrature.weighted_quad(
        lambda x: fe(x) * (x ** 4 - 4.0 * x * x + 2.0), breaks=breaks
    )
    return MeanBreakdown(
        leading=n * lead / (2.0 * math.pi),
        arcsine_term=-arc / (2.0 * math.pi),
        edge_term=(fe(np.float64(2.0)) + fe(np.float64(-2.0))) / 4.0,
        a2_term=(1.0 - a2) / (2.0 * math.pi) * i2,
        s4_term=s4 / (2.0 * math.pi) * i4,
        disagreement=max(d1, d2, d3, d4),
    )


def indicator_integrals(gamma):
    """Closed forms of the three cumulant integrals for f = 1{x <= gamma}.

    Returns (I_s4, I_a2edge, I_x) =
    (sqrt(4-g^2)(2g-g^3)/(8 pi), sqrt(4-g^2) g/(4 pi), -sqrt(4-g^2)/(2 pi)).
    """
    if not -2.0 < gamma < 2.0:
        raise DomainError("indicator integrals need |gamma| < 2")
    root = math.sqrt(4.0 - gamma * gamma)
    return (
        root * (2.0 * gamma - gamma ** 3) / (8.0 * math.pi),
        root * gamma / (4.0 * math.pi),
        -root / (2.0 * math.pi),
    )


def single_eigenvalue_mean(gamma_i, s4, a2, kappa=0.0):
    """Prediction for N E[lambda_i - gamma_i] at bulk location gamma_i."""
    if not abs(gamma_i) < 2.0 - kappa:
        raise DomainError("gamma_i outside the bulk window")
    rho = semicircle.density(gamma_i)
    return (
        math.asin(gamma_i / 2.0) / (2.0 * math.pi * rho)
        - 1.0 / (2.0 * rho)
        + s4 / 4.0 * (gamma_i ** 3 - 2.0 * gamma_i)
        + (a2 - 1.0) / 2.0 * gamma_i
    )


def single_eigenvalue_variance_shift(gamma_i, s4, a2, n):
    """Var(lambda_i) difference to GOE: s4 gamma^2/(8 N^2) + (a2-1)/N^2."""
    if not abs(gamma_i) < 2.0:
        raise DomainError("gamma_i outside the bulk")
    return s4 * gamma_i * gamma_i / (8.0 * n * n) + (a2 - 1.0) / (n * n)


def mesoscopic_variance(f, c_sym, rtol=1e-4, r0=16.0, max_doublings=5):
    """Limiting variance (c_sym/2 pi^2) double integral of the squared
    difference quotient of f over the whole plane.

    f must tend to a common constant on both sides; otherwise the integral
    diverges and a domain error is raised.  Truncation at radius R plus an
    analytic one-sided tail correction, with R and nodes doubled jointly.
    """
    fe, fd, breaks = _fn(f)
    q = quadrature.difference_quotient_sq(fe, fd)
    prev = None
    r, n = r0, 256
    for _ in range(max_doublings + 1):
        left, right = float(fe(np.float64(-r))), float(fe(np.float64(r)))
        if abs(left - right) > 1e-3:
            raise DomainError(
                "f has different limits at +/- infinity; variance diverges"
            )
        c = 0.5 * (left + right)
        core = quadrature.plane_double_quad(q, r, n, breaks=breaks)
        # both one-sided tails: for |y| > R, f(y) ~ c
        tail, _ = quadrature.adaptive_quad(
            lambda x: (fe(x) - c) ** 2 * (1.0 / (r - x + 1e-12)
                                          + 1.0 / (r + x + 1e-12)),
            -r, r, n0=256, breaks=breaks, rtol=1e-4,
        )
        val = core + 2.0 * tail
        if prev is not None and abs(val - prev) <= rtol * max(abs(val), 1e-12):
            return c_sym / (2.0 * math.pi ** 2) * val
        prev = val
        r *= 2.0
        n *= 2
    raise DomainError(
        "plane double integral did not stabilize under truncation doubling"
    )


def beta_variance_functional(f, a, b, beta):
    """Variance functional for a one-cut ensemble on [a, b] at temperature beta."""
    if not a < b:
        raise DomainError("need a < b")
    fe, fd, breaks = _fn(f)
    mid, half = 0.5 * (a + b), 0.5 * (b - a)
    q = quadrature.difference_quotient_sq(fe, fd)

    def integrand(t, u):
        x = mid + half * np.sin(t)
        y = mid + half * np.sin(u)
        kern = -a * b - x * y + 0.5 * (a + b) * (x + y)
        return q(x, y) * kern

    tb = tuple(
        math.asin((p - mid) / half) for p in breaks if a < p < b
    )
    prev = None
    n = 256
    for _ in range(5):
        t, w = quadrature._tensor_panels(-math.pi / 2.0, math.pi / 2.0, tb, n)
        val = float(w @ integrand(t[:, None], t[None, :]) @ w)
        if prev is not None and abs(val - prev) <= max(1e-6 * abs(val), 1e-10):
            return val / (2.0 * beta * math.pi ** 2)
        prev = val
        n *= 2
    raise DomainError("beta variance quadrature did not converge")


def gustavsson_scaling(gamma_i, n, beta=None):
    """Affine normalization (center, scale) sending lambda_i to a standard
    normal variable.  beta None selects the Wigner scaling; otherwise the
    beta-ensemble scaling with density rho_sc(gamma_i).
    """
    if not abs(gamma_i) < 2.0:
        raise DomainError("bulk location required")
    if beta is None:
        scale = math.sqrt(math.log(n) / (1.0 - gamma_i * gamma_i / 4.0)) / n
    else:
        if beta < 1.0:
            raise DomainError("beta >= 1 required")
        rho = semicircle.density(gamma_i)
        scale = 2.0 * math.sqrt(math.log(n)) / (
            math.sqrt(beta) * n * rho * math.pi
        )
    return gamma_i, scale
