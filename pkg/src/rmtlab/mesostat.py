"""Spectral observables: counting functions, normalized fluctuations,
linear and mesoscopic statistics, and the homogenization observable Phi.

Test functions are catalog values carrying their derivative and certified
norm bounds, so experiment setup can check the smoothness budget
||f''||_1 <= N^{1-c} before any sampling happens.
"""
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.interpolate import CubicSpline

from rmtlab import semicircle
from rmtlab.errors import DomainError


@dataclass(frozen=True)
class TestFunction:
    name: str
    evaluate: Callable
    derivative: Callable
    norms: tuple  # certified upper bounds (||f||_1, ||f'||_1, ||f''||_1)
    support_margin: float
    panel_breaks: tuple = ()


def validate_test_function(f, n=None, c=0.5, probes=100):
    """Check the derivative against finite differences and, when a matrix
    dimension is declared, the norm budget ||f''||_1 <= N^{1-c}."""
    xs = np.linspace(-2.0 + 1e-3, 2.0 - 1e-3, probes)
    h = 1e-6
    fd = (f.evaluate(xs + h) - f.evaluate(xs - h)) / (2.0 * h)
    if np.max(np.abs(fd - f.derivative(xs))) > 1e-5:
        raise DomainError(f"{f.name}: derivative disagrees with finite differences")
    if n is not None and f.norms[2] > n ** (1.0 - c):
        raise DomainError(f"{f.name}: ||f''||_1 exceeds the N^(1-c) budget")
    return True


# --- smoothstep machinery (C^3 septic: 1 for |y| <= 1, 0 for |y| >= 2) ---

def _sstep(t):
    t = np.clip(t, 0.0, 1.0)
    return t ** 4 * (35.0 - 84.0 * t + 70.0 * t * t - 20.0 * t ** 3)


def _sstep_d(t):
    tc = np.clip(t, 0.0, 1.0)
    return np.where(
        (t > 0.0) & (t < 1.0), 140.0 * (tc * (1.0 - tc)) ** 3, 0.0
    )


def chi(y):
    """Smooth cutoff: 1 on |y| <= 1, 0 on |y| >= 2, C^3 in between."""
    return _sstep(2.0 - np.abs(y))


def chi_d(y):
    return -np.sign(y) * _sstep_d(2.0 - np.abs(y))


def gaussian_bump():
    f = lambda x: np.exp(-4.0 * x * x)
    fp = lambda x: -8.0 * x * np.exp(-4.0 * x * x)
    # ||f||_1 = sqrt(pi)/2; ||f'||_1 = 2 f(0); TV(f') < 7
    return TestFunction("gaussian_bump", f, fp,
                        (math.sqrt(math.pi) / 2.0, 2.0, 7.0), 0.5)


def smoothstep_indicator(center, width):
    """Smoothed version of 1{x <= center}, transitioning over +/- width."""
    if width <= 0.0:
        raise DomainError("width must be positive")
    c, w = float(center), float(width)

    def f(x):
        return _sstep((c + w - np.asarray(x, dtype=float)) / (2.0 * w))

    def fp(x):
        return -_sstep_d((c + w - np.asarray(x, dtype=float)) / (2.0 * w)) / (2.0 * w)

    smax = 140.0 / 64.0  # peak of the septic smoothstep derivative
    return TestFunction(
        f"smoothstep_indicator({c:g},{w:g})", f, fp,
        (4.0, 1.0, smax / w), 2.0 - (abs(c) + w),
        panel_breaks=(c - w, c + w),
    )


def bpz_cubic_spline(u=0.3):
    """C^2 cubic spline vanishing at the threshold u, zero outside [-1.5, 1.5]."""
    knots = np.array([-1.5, -0.75, 0.0, u, 0.8, 1.5])
    vals = np.array([0.0, 0.8, 0.3, 0.0, -0.5, 0.0])
    cs = CubicSpline(knots, vals, bc_type="clamped")
    dcs = cs.derivative()
    d2 = cs.derivative(2)

    def f(x):
        x = np.asarray(x, dtype=float)
        return np.where((x > -1.5) & (x < 1.5), cs(np.clip(x, -1.5, 1.5)), 0.0)

    def fp(x):
        x = np.asarray(x, dtype=float)
        return np.where((x > -1.5) & (x < 1.5), dcs(np.clip(x, -1.5, 1.5)), 0.0)

    # certified bounds by dense sampling of the closed-form spline pieces
    grid = np.linspace(-1.5, 1.5, 6001)
    n1 = float(np.trapezoid(np.abs(cs(grid)), grid)) * 1.01
    n2 = float(np.trapezoid(np.abs(dcs(grid)), grid)) * 1.01
    n3 = float(np.trapezoid(np.abs(d2(grid)), grid)) * 1.01
    return TestFunction(f"bpz_cubic_spline(u={u:g})", f, fp,
                        (n1, n2, n3), 0.5, panel_breaks=tuple(knots))


def restrict_below(f, u):
    """f(x) 1{x <= u} as a TestFunction (kinked at u unless f(u) = 0)."""
    fe, fd = f.evaluate, f.derivative

    def g(x):
        x = np.asarray(x, dtype=float)
        return np.where(x <= u, fe(x), 0.0)

    def gp(x):
        x = np.asarray(x, dtype=float)
        return np.where(x <= u, fd(x), 0.0)

    return TestFunction(
        f"{f.name}*1(x<={u:g})", g, gp, f.norms, f.support_margin,
        panel_breaks=tuple(sorted(set(f.panel_breaks) | {u})),
    )


TEST_FUNCTION_CATALOG = {
    "gaussian_bump": gaussian_bump,
    "smoothstep_indicator": smoothstep_indicator,
    "bpz_cubic_spline": bpz_cubic_spline,
}


# --- observables -----------------------------------------------------------

def counting_function(s, e):
    """#{i : lambda_i <= E}; right-continuous in E."""
    return int(np.searchsorted(s.values, e, side="right"))


def eigenvalue_z_score(s, i, kappa=0.05):
    """N(lambda_i - gamma_i)/sqrt(log N/(1 - gamma_i^2/4)), i one-based."""
    n = s.n
    if not kappa * n <= i <= (1.0 - kappa) * n:
        raise DomainError("index outside the bulk window")
    gamma = semicircle.classical_locations(n)[i - 1]
    scale = math.sqrt(math.log(n) / (1.0 - gamma * gamma / 4.0))
    return n * (s.values[i - 1] - gamma) / scale


def counting_z_score(s, e, kappa=0.05):
    """(N(E) - N F(E)) pi / sqrt(log N)."""
    n = s.n
    if not -2.0 + kappa < e < 2.0 - kappa:
        raise DomainError("E outside the bulk window")
    return (counting_function(s, e) - n * semicircle.cdf(e)) * math.pi / math.sqrt(
        math.log(n)
    )


def linear_statistic(s, f):
    """sum_j f(lambda_j), compensated summation."""
    return math.fsum(np.asarray(f.evaluate(s.values), dtype=float))


def mesoscopic_statistic(s, f, e, alpha):
    """sum_j f(N^alpha (lambda_j - E))."""
    if not 0.0 < alpha < 1.0:
        raise DomainError("alpha must lie in (0, 1)")
    if not -2.0 < e < 2.0:
        raise DomainError("E must lie in the bulk")
    n = s.n
    return math.fsum(
        np.asarray(f.evaluate(n ** alpha * (s.values - e)), dtype=float)
    )


def partial_linear_statistic(s, f, u):
    vals = s.values
    mask = vals <= u
    return math.fsum(np.asarray(f.evaluate(vals[mask]), dtype=float))


def ranked_partial_statistic(s, f, k, kappa=0.05):
    n = s.n
    if not kappa * n <= k <= (1.0 - kappa) * n:
        raise DomainError("rank outside the bulk window")
    return math.fsum(np.asarray(f.evaluate(s.values[:k]), dtype=float))


# --- homogenization observable --------------------------------------------

@dataclass(frozen=True)
class HomogenizationObservable:
    fn: TestFunction
    gamma: float
    t1: float
    eps1: float
    n: int
    rho: float
    far_value: float

    def evaluate(self, x):
        return self.fn.evaluate(x)

    def derivative(self, x):
        return self.fn.derivative(x)


def build_homogenization_observable(gamma_i, t1, eps1, n, tau0=None):
    """Phi(y): cumulative integral of the cutoff Poisson kernel.

    Phi interpolates between 0 far left of gamma_i and roughly
    1/rho_sc(gamma_i) far right; the shortfall from 1/rho is the Lorentzian
    mass outside the cutoff window, which vanishes only slowly in N.  The
    kernel carries the standard 1/pi Poisson normalization so the full-line
    mass is exactly 1/rho.
    """
    if eps1 <= 0.0:
        raise DomainError("eps1 must be positive")
    if tau0 is not None and not eps1 < tau0 / 10.0:
        raise DomainError("eps1 must be below tau0/10")
    w = t1 * n ** eps1
    if w >= 0.5:
        raise DomainError("cutoff window t1 N^eps1 must be well below 1")
    if not -2.0 + 2.0 * w < gamma_i < 2.0 - 2.0 * w:
        raise DomainError("window sticks out of the spectral bulk")
    rho = semicircle.density(gamma_i)
    s = t1 * rho

    def kernel(x):
        dx = np.asarray(x, dtype=float) - gamma_i
        return chi(dx / w) * (s / math.pi) / (rho * (dx * dx + s * s))

    # grid: uniform resolution of the chi transition plus arctan-spaced
    # points resolving the Lorentzian peak
    lin = np.linspace(gamma_i - 2.0 * w, gamma_i + 2.0 * w, 1601)
    umax = math.atan(2.0 * w / s)
    tan_pts = gamma_i + s * np.tan(np.linspace(-umax, umax, 1601))
    grid = np.unique(np.concatenate([lin, tan_pts]))

    gx, gw = np.polynomial.legendre.leggauss(16)
    lo, hi = grid[:-1], grid[1:]
    half = 0.5 * (hi - lo)
    nodes = 0.5 * (lo + hi)[:, None] + half[:, None] * gx[None, :]
    pieces = (kernel(nodes) @ gw) * half
    phi_vals = np.concatenate([[0.0], np.cumsum(pieces)])
    far = float(phi_vals[-1])
    spline = CubicSpline(grid, phi_vals)

    def f(y):
        y = np.asarray(y, dtype=float)
        inside = spline(np.clip(y, grid[0], grid[-1]))
        return np.where(y <= grid[0], 0.0, np.where(y >= grid[-1], far, inside))

    fn = TestFunction(
        f"phi(gamma={gamma_i:g},t1={t1:g})", f, kernel,
        (4.0 / rho, 1.1 / rho, 2.0 * n ** eps1 / t1), 0.0,
        panel_breaks=(gamma_i - 2.0 * w, gamma_i, gamma_i + 2.0 * w),
    )
    return HomogenizationObservable(
        fn=fn, gamma=float(gamma_i), t1=float(t1), eps1=float(eps1),
        n=int(n), rho=float(rho), far_value=far,
    )


def zeta_statistic(s, phi):
    """zeta = sum Phi(lambda_j) - sum Phi(gamma_j)."""
    if s.n != phi.n:
        raise DomainError("spectrum dimension does not match the observable")
    gamma = semicircle.classical_locations(s.n)
    lam_sum = math.fsum(np.asarray(phi.evaluate(s.values), dtype=float))
    gam_sum = math.fsum(np.asarray(phi.evaluate(gamma), dtype=float))
    return lam_sum - gam_sum
