import math

import numpy as np
import pytest

from rmtlab import dbm, rng, semicircle
from rmtlab.ensembles import QUADRATIC, Potential
from rmtlab.errors import DomainError, IntegrationError


def test_state_validates_ordering():
    with pytest.raises(DomainError):
        dbm.DBMState(positions=np.array([0.0, 0.0, 1.0]), time=0.0)
    s = dbm.DBMState(positions=np.array([-1.0, 1.0]), time=0.0)
    assert s.n == 2


def test_drift_signs_and_antisymmetry():
    x = np.array([-1.0, 0.0, 2.0])
    f = dbm._drift(x, 3, QUADRATIC)
    repulsion = f + 0.5 * x  # strip the confinement part
    # pairwise repulsion pushes the extremes outward and sums to zero
    assert np.sum(repulsion) == pytest.approx(0.0, abs=1e-12)
    assert repulsion[0] < 0.0 and repulsion[-1] > 0.0


def test_dbm_step_requires_positive_dt():
    s = dbm.DBMState(positions=np.array([-1.0, 1.0]), time=0.0)
    with pytest.raises(DomainError):
        dbm.dbm_step(s, np.zeros(2), 0.0)


def test_dbm_step_pure_function_of_inputs():
    s = dbm.DBMState(positions=np.linspace(-1.5, 1.5, 10), time=0.0)
    noise = rng.stream(2, 0).standard_normal(10) * math.sqrt(1e-3)
    a = dbm.dbm_step(s, noise, 1e-3)
    b = dbm.dbm_step(s, noise, 1e-3)
    assert np.array_equal(a.positions, b.positions)
    assert a.time == pytest.approx(1e-3)
    assert np.all(np.diff(a.positions) > 0.0)


def test_dbm_step_raises_at_floor_on_forced_collision():
    # huge noise pushing two close particles through each other cannot be
    # resolved by splitting: the endpoint is pinned by the bridge
    s = dbm.DBMState(positions=np.array([-1.0, -0.001, 0.001, 1.0]), time=0.0)
    noise = np.array([0.0, 0.5, -0.5, 0.0])
    with pytest.raises(IntegrationError) as exc:
        dbm.dbm_step(s, noise, 1e-4, rng=rng.stream(0, 0))
    assert exc.value.pair is not None


def test_single_particle_is_ornstein_uhlenbeck():
    # N=1: dx = sqrt(2) dB - x/2 dt; stationary variance 2
    g = rng.stream(5, 9)
    dt, vals = 0.01, []
    for _ in range(1500):
        s = dbm.DBMState(positions=np.array([g.standard_normal() * math.sqrt(2.0)]),
                         time=0.0)
        for _ in range(20):
            s = dbm.dbm_step(s, g.standard_normal(1) * math.sqrt(dt), dt, rng=g)
        vals.append(s.positions[0])
    assert np.var(vals) == pytest.approx(2.0, rel=0.25)


def test_two_particles_track_gap_ode():
    # with no noise the gap g solves g' = 2·(2/(N g) - g/2)... the
    # deterministic flow has fixed point g* = 2 sqrt(2/N); starting there the
    # gap must stay put
    n = 2
    gstar = 2.0 * math.sqrt(1.0 / n)
    s = dbm.DBMState(positions=np.array([-gstar / 2.0, gstar / 2.0]), time=0.0)
    for _ in range(50):
        s = dbm.dbm_step(s, np.zeros(n), 1e-3, rng=rng.stream(1, 1))
    assert s.positions[1] - s.positions[0] == pytest.approx(gstar, rel=1e-6)


def test_run_coupling_deterministic_and_ordered():
    g = rng.stream(3, 0)
    x0 = np.sort(g.standard_normal(30))
    y0 = np.sort(g.standard_normal(30))
    c1 = dbm.run_coupling(x0, y0, 0.05, seed=17, global_steps=32)
    c2 = dbm.run_coupling(x0, y0, 0.05, seed=17, global_steps=32)
    assert np.array_equal(c1.x.positions, c2.x.positions)
    assert np.array_equal(c1.y.positions, c2.y.positions)
    assert np.all(np.diff(c1.x.positions) > 0.0)
    assert np.all(np.diff(c1.y.positions) > 0.0)
    assert c1.reflections == c2.reflections


def test_run_coupling_identical_starts_stay_identical():
    g = rng.stream(8, 0)
    x0 = np.sort(g.standard_normal(25))
    c = dbm.run_coupling(x0, x0, 0.05, seed=4, global_steps=32)
    assert np.array_equal(c.x.positions, c.y.positions)


def test_run_coupling_shape_mismatch():
    with pytest.raises(DomainError):
        dbm.run_coupling(np.zeros(3), np.zeros(4), 0.1, seed=0)


def test_coupling_contracts_toward_homogenization():
    # after time t the coupled difference shrinks relative to the initial one
    g = rng.stream(21, 0)
    x0 = np.sort(g.standard_normal(40)) * 0.9
    y0 = x0 + 0.05 * np.sin(np.arange(40))
    y0 = np.sort(y0)
    c = dbm.run_coupling(x0, y0, 0.3, seed=5, global_steps=64)
    d0 = np.abs(x0 - y0)
    d1 = np.abs(c.x.positions - c.y.positions)
    assert np.mean(d1) < np.mean(d0)


def test_custom_potential_is_used():
    # V(x) = x^2 has twice the confinement: stationary cloud is narrower
    tight = Potential("tight", lambda x: x * x, lambda x: 2.0 * x)
    g = rng.stream(2, 2)
    x0 = np.sort(g.standard_normal(20))
    ca = dbm.run_coupling(x0, x0, 1.0, seed=9, beta=1.0, global_steps=64)
    cb = dbm.run_coupling(x0, x0, 1.0, seed=9, beta=1.0, potential=tight,
                          global_steps=64)
    assert np.std(cb.x.positions) < np.std(ca.x.positions)


def test_homogenization_residual_index_check():
    from rmtlab import mesostat

    n = 50
    g = rng.stream(6, 0)
    x0 = np.sort(g.standard_normal(n))
    c = dbm.run_coupling(x0, x0, 0.02, seed=2, global_steps=16)
    phi = mesostat.build_homogenization_observable(0.0, 0.08, 0.05, n)
    r = dbm.homogenization_residual(c, 25, phi)
    # identical trajectories: gap and zeta difference both vanish
    assert r == pytest.approx(0.0, abs=1e-12)
    with pytest.raises(DomainError):
        dbm.homogenization_residual(c, 0, phi)


def test_poisson_kernel_mass():
    # full-line integral is 1/rho(gamma)
    gamma, t1 = 0.3, 0.05
    x = np.linspace(-60.0, 60.0, 2000001)
    mass = np.trapezoid(dbm.poisson_kernel(gamma, x, t1), x)
    rho = semicircle.density(gamma)
    assert mass == pytest.approx(1.0 / rho, rel=1e-3)
    # symmetric and peaked at gamma
    assert dbm.poisson_kernel(gamma, gamma + 0.01, t1) == pytest.approx(
        dbm.poisson_kernel(gamma, gamma - 0.01, t1))
