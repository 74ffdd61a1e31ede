"""Samplers: Wigner matrices with prescribed entry cumulants,
Gaussian-divisible ensembles, beta-Hermite tridiagonals, and a best-effort
Gibbs MCMC for general one-cut potentials.

Entry laws are a fixed catalog with analytic cumulants so that theory
predictions have exact inputs; the matrix normalization is entries of
variance 1/N off the diagonal.
"""
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from rmtlab import semicircle
from rmtlab.errors import ConfigurationError, DomainError
from rmtlab.spectra import TridiagonalMatrix


@dataclass(frozen=True)
class EntryLaw:
    """Centered entry distribution with its low-order cumulants."""

    name: str
    variance: float
    kappa3: float
    kappa4: float
    draw: Callable = field(repr=False)

    def sample(self, rng, size):
        return self.draw(rng, size)


_SQRT3 = math.sqrt(3.0)


def _gauss(rng, size):
    return rng.standard_normal(size)


def _gauss2(rng, size):
    return rng.standard_normal(size) * math.sqrt(2.0)


def _rademacher(rng, size):
    return rng.integers(0, 2, size=size) * 2.0 - 1.0


def _uniform(rng, size):
    return rng.uniform(-_SQRT3, _SQRT3, size=size)


def _skewed(rng, size):
    # two-point law: -1/2 w.p. 4/5, 2 w.p. 1/5 (mean 0, variance 1)
    return np.where(rng.random(size) < 0.8, -0.5, 2.0)


GAUSSIAN = EntryLaw("gaussian", 1.0, 0.0, 0.0, _gauss)
GAUSSIAN_VAR2 = EntryLaw("gaussian_var2", 2.0, 0.0, 0.0, _gauss2)
RADEMACHER = EntryLaw("rademacher", 1.0, 0.0, -2.0, _rademacher)
UNIFORM = EntryLaw("uniform", 1.0, 0.0, -1.2, _uniform)
SKEWED_TWO_POINT = EntryLaw("skewed_two_point", 1.0, 1.5, 0.25, _skewed)

_CATALOG = {
    law.name: law
    for law in (GAUSSIAN, GAUSSIAN_VAR2, RADEMACHER, UNIFORM, SKEWED_TWO_POINT)
}


def entry_law_catalog():
    return list(_CATALOG.values())


def entry_law(name):
    try:
        return _CATALOG[name]
    except KeyError:
        raise ConfigurationError(f"unknown entry law {name!r}") from None


@dataclass(frozen=True)
class WignerSpec:
    """Wigner matrix model: off-diagonal law xi_o, diagonal law xi_d.

    Cumulant summary: s_k are the cumulants of xi_o (s2 must be 1);
    s_k + a_k are the cumulants of xi_d, so GOE has a2 = 1.
    """

    n: int
    offdiag: EntryLaw = GAUSSIAN
    diag: EntryLaw = GAUSSIAN_VAR2

    def __post_init__(self):
        if self.n < 2:
            raise DomainError("need n >= 2")
        if abs(self.offdiag.variance - 1.0) > 1e-12:
            raise ConfigurationError("off-diagonal law must have variance 1")

    @property
    def s3(self):
        return self.offdiag.kappa3

    @property
    def s4(self):
        return self.offdiag.kappa4

    @property
    def a2(self):
        return self.diag.variance - 1.0

    @property
    def a3(self):
        return self.diag.kappa3 - self.s3

    @property
    def a4(self):
        return self.diag.kappa4 - self.s4


def goe(n):
    return WignerSpec(n, GAUSSIAN, GAUSSIAN_VAR2)


def sample_wigner(spec, rng):
    """Dense symmetric draw, entries scaled by 1/sqrt(N).

    Draw order (upper triangle row-major, then diagonal) is fixed so the
    sample is a pure function of (spec, rng state).
    """
    n = spec.n
    iu = np.triu_indices(n, 1)
    h = np.zeros((n, n))
    h[iu] = spec.offdiag.sample(rng, iu[0].size)
    h = h + h.T
    h[np.diag_indices(n)] = spec.diag.sample(rng, n)
    h /= math.sqrt(n)
    return h


@dataclass(frozen=True)
class GaussianDivisibleSpec:
    base: WignerSpec
    t0: float

    def __post_init__(self):
        if not 0.0 < self.t0 < 1.0:
            raise DomainError("t0 must lie in (0, 1)")


def sample_gaussian_divisible(spec, rng):
    """exp(-t0/2) X' + sqrt(1 - exp(-t0)) W with W an independent GOE draw."""
    x = sample_wigner(spec.base, rng)
    w = sample_wigner(goe(spec.base.n), rng)
    return math.exp(-spec.t0 / 2.0) * x + math.sqrt(1.0 - math.exp(-spec.t0)) * w


@dataclass(frozen=True)
class BetaHermiteSpec:
    n: int
    beta: float

    def __post_init__(self):
        if self.beta < 1.0:
            raise DomainError("beta >= 1 required")
        if self.n < 2:
            raise DomainError("need n >= 2")


def sample_beta_hermite(spec, rng):
    """Tridiagonal model whose eigenvalue law is the Gaussian beta-ensemble
    normalized to equilibrium support [-2, 2].

    Diagonal N(0, 2/(beta n)); off-diagonal entry k is chi with parameter
    beta (n - k), all scaled by 1/sqrt(beta n).  At beta = 1 the spectrum is
    GOE in law, which makes this the O(n^2) fast path for GOE statistics.
    """
    n, beta = spec.n, spec.beta
    scale = 1.0 / math.sqrt(beta * n)
    diag = rng.standard_normal(n) * (math.sqrt(2.0) * scale)
    dof = beta * np.arange(n - 1, 0, -1, dtype=float)
    off = np.sqrt(rng.chisquare(dof)) * scale
    return TridiagonalMatrix(diag=diag, offdiag=off)


@dataclass(frozen=True)
class Potential:
    """Confining external potential for the Gibbs sampler."""

    name: str
    v: Callable
    vprime: Callable
    confining: bool = True


QUADRATIC = Potential("quadratic", lambda x: 0.5 * x * x, lambda x: x)


def sample_beta_gibbs_mcmc(potential, beta, n, rng, steps):
    """One approximate sample of the beta-ensemble for a general potential.

    Single-particle Metropolis sweeps on the log density
    -beta N (1/2 sum V - (1/N) sum log gaps).  Proposals that would cross a
    neighbor are rejected, so the output stays strictly increasing.  This is
    best-effort: mixing for hard potentials is the caller's problem, and
    burn-in of 10 n sweeps is enforced as a floor on steps.
    """
    if not potential.confining:
        raise ConfigurationError("potential must be confining")
    if beta < 1.0:
        raise DomainError("beta >= 1 required")
    if steps < 10 * n:
        raise ConfigurationError("steps must cover the 10 n sweep burn-in")
    x = np.array(semicircle.classical_locations(n))
    # proposal scale adapted to the local semicircle density estimate
    scales = 1.0 / (n * np.maximum(semicircle.density(x), 0.1))
    for _ in range(steps):
        props = rng.standard_normal(n)
        us = np.log(rng.random(n))
        for i in range(n):
            xi = x[i]
            xp = xi + scales[i] * props[i]
            if (i > 0 and xp <= x[i - 1]) or (i < n - 1 and xp >= x[i + 1]):
                continue
            others = np.delete(x, i)
            logr = beta * (
                -0.5 * n * (potential.v(xp) - potential.v(xi))
                + np.sum(np.log(np.abs(xp - others)))
                - np.sum(np.log(np.abs(xi - others)))
            )
            if us[i] < logr:
                x[i] = xp
    return x
