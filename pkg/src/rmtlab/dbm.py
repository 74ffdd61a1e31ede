"""Dyson Brownian Motion with shared-noise coupling.

Explicit Euler with gap-adaptive substepping.  A global step carries one
Brownian increment vector; when a substep must be halved, the increment is
split by Brownian-bridge sampling so the path law is unchanged.  Coupled
trajectories are advanced in lockstep: the substep schedule is the union of
both trajectories' constraints and both consume identical increments.
"""
import math
from dataclasses import dataclass

import numpy as np

from rmtlab import rng as rngmod
from rmtlab._kernels import pairwise_inverse_sum
from rmtlab.ensembles import QUADRATIC, Potential
from rmtlab.errors import DomainError, IntegrationError

_FLOOR_SPLITS = 16  # substep floor dt / 2^16


@dataclass(frozen=True)
class DBMState:
    positions: np.ndarray
    time: float
    beta: float = 1.0
    potential: Potential = QUADRATIC

    def __post_init__(self):
        x = np.ascontiguousarray(self.positions, dtype=float)
        if np.any(np.diff(x) <= 0.0):
            raise DomainError("positions must be strictly increasing")
        object.__setattr__(self, "positions", x)

    @property
    def n(self):
        return len(self.positions)


def _drift(x, n, potential):
    return pairwise_inverse_sum(x) / n - 0.5 * potential.vprime(x)


def _advance_all(trajs, beta, potential, h, db, rng, floor, reflect=False):
    """Advance every trajectory in trajs by time h with shared increment db.

    trajs is a list of position vectors (fresh copies are returned).
    Splits segments until the quarter-gap drift rule and a noise-vs-gap rule
    hold for all trajectories; ordering violations also force a split.

    At the substep floor a near-collision either raises (reflect=False) or
    is resolved by sorting the positions, i.e. reflecting the offending
    pair.  At beta = 1 the gap process is critical and makes arbitrarily
    deep excursions, so a floor-level reflection policy is the only way to
    bound the work; reflections happen at the resolution scale of the floor
    and are counted, never silent.  Returns (trajectories, reflections).
    """
    cur = np.array(trajs, dtype=float)  # (k, n) stack, rows in lockstep
    n = cur.shape[1]
    diff = math.sqrt(2.0 / (n * beta))
    reflections = 0
    stack = [(h, db)]
    cache = None  # (drift, hmax, worst); positions only change on accept
    while stack:
        seg_h, seg_db = stack.pop()
        if cache is None:
            drift = _drift(cur, n, potential)
            hmax = np.inf
            worst = (0, 1)
            if n > 1:
                gaps = np.diff(cur, axis=1)
                k = int(np.argmin(gaps))
                fmax = float(np.max(np.abs(drift)))
                if fmax > 0.0:
                    hmax = float(gaps.flat[k]) / (4.0 * fmax)
                worst = (k % (n - 1), k % (n - 1) + 1)
            cache = (drift, hmax, worst)
        else:
            drift, hmax, worst = cache
        at_floor = seg_h / 2.0 < floor
        ok = seg_h <= hmax or at_floor
        if ok:
            news = cur + diff * seg_db + drift * seg_h
            if not np.all(np.diff(news, axis=1) > 0.0):
                if not at_floor:
                    ok = False
                elif reflect:
                    news = np.sort(news, axis=1)
                    reflections += 1
                else:
                    raise IntegrationError(
                        "substep floor reached with persistent near-collision",
                        pair=worst,
                    )
        if ok:
            cur = news
            cache = None
            continue
        # Brownian-bridge split of the increment over two half-steps
        first = 0.5 * seg_db + math.sqrt(seg_h / 4.0) * rng.standard_normal(n)
        stack.append((seg_h / 2.0, seg_db - first))
        stack.append((seg_h / 2.0, first))
    return cur, reflections


def dbm_step(state, noise, dt, rng=None):
    """One global Euler step of size dt with Brownian increment vector noise.

    noise must have variance dt per coordinate.  rng supplies bridge
    refinements when subdivision is needed; if omitted, a generator keyed on
    the noise bytes is used so the step stays a pure function of its inputs.
    """
    if dt <= 0.0:
        raise DomainError("dt must be positive")
    noise = np.ascontiguousarray(noise, dtype=float)
    if rng is None:
        key = int.from_bytes(noise.tobytes()[:8], "little")
        rng = rngmod.stream(key, 0xB21D6E)
    (new,), _ = _advance_all(
        [state.positions], state.beta, state.potential,
        dt, noise, rng, dt / 2 ** _FLOOR_SPLITS,
    )
    return DBMState(positions=new, time=state.time + dt,
                    beta=state.beta, potential=state.potential)


@dataclass(frozen=True)
class CouplingState:
    x: DBMState
    y: DBMState
    x0: np.ndarray
    y0: np.ndarray
    t1: float
    seed: int
    reflections: int = 0


def run_coupling(x0, y0, t1, seed, beta=1.0, potential=QUADRATIC,
                 global_steps=256):
    """Advance two DBM trajectories to t1 under identical Brownian terms."""
    x0 = np.asarray(getattr(x0, "values", x0), dtype=float)
    y0 = np.asarray(getattr(y0, "values", y0), dtype=float)
    if x0.shape != y0.shape:
        raise DomainError("trajectory dimensions differ")
    n = len(x0)
    g = rngmod.stream(seed, 0)
    dt = t1 / global_steps
    floor = dt / 2 ** _FLOOR_SPLITS
    xs, ys = np.array(x0), np.array(y0)
    reflections = 0
    for _ in range(global_steps):
        db = g.standard_normal(n) * math.sqrt(dt)
        (xs, ys), refl = _advance_all(
            [xs, ys], beta, potential, dt, db, g, floor, reflect=True)
        reflections += refl
    xf = DBMState(positions=xs, time=t1, beta=beta, potential=potential)
    yf = DBMState(positions=ys, time=t1, beta=beta, potential=potential)
    return CouplingState(x=xf, y=yf, x0=x0, y0=y0, t1=t1, seed=seed,
                         reflections=reflections)


def homogenization_residual(c, i, phi):
    """x_i(t1) - y_i(t1) - (zeta_x - zeta_y)/N, i one-based bulk index."""
    from rmtlab.mesostat import zeta_statistic
    from rmtlab.spectra import Spectrum

    n = len(c.x0)
    if not 1 <= i <= n:
        raise DomainError("index out of range")
    zx = zeta_statistic(Spectrum(values=c.x0), phi)
    zy = zeta_statistic(Spectrum(values=c.y0), phi)
    gap = c.x.positions[i - 1] - c.y.positions[i - 1]
    return gap - (zx - zy) / n


def poisson_kernel(gamma_i, x, t1):
    """Cauchy kernel surrogate for the short-time DBM transition density,
    normalized so its full-line integral is 1/rho_sc(gamma_i)."""
    from rmtlab import semicircle

    rho = semicircle.density(gamma_i)
    s = t1 * rho
    dx = np.asarray(x, dtype=float) - gamma_i
    out = (s / math.pi) / (rho * (dx * dx + s * s))
    return out if out.ndim else float(out)
