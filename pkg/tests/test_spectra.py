import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rmtlab import spectra
from rmtlab.errors import DomainError


def _random_symmetric(n, seed):
    rng = np.random.default_rng(seed)
    a = rng.standard_normal((n, n))
    return (a + a.T) / 2.0


def test_tridiagonal_shape_check():
    with pytest.raises(DomainError):
        spectra.TridiagonalMatrix(diag=np.zeros(4), offdiag=np.zeros(4))


def test_spectrum_requires_sorted():
    with pytest.raises(DomainError):
        spectra.Spectrum(values=np.array([1.0, 0.0]))


def test_householder_preserves_trace_and_spectrum():
    h = _random_symmetric(40, 3)
    t = spectra.householder_tridiagonalize(h)
    assert t.trace() == pytest.approx(np.trace(h), abs=1e-10)
    vals = spectra.eigen_tridiagonal(t).values
    ref = np.linalg.eigvalsh(h)
    assert np.max(np.abs(vals - ref)) < 1e-11


def test_eigen_symmetric_matches_numpy():
    for seed in range(5):
        h = _random_symmetric(60, seed)
        vals = spectra.eigen_symmetric(h).values
        assert np.max(np.abs(vals - np.linalg.eigvalsh(h))) < 1e-11


def test_eigen_symmetric_weyl_shift():
    h = _random_symmetric(50, 11)
    c = 0.7361
    base = spectra.eigen_symmetric(h).values
    shifted = spectra.eigen_symmetric(h + c * np.eye(50)).values
    assert np.max(np.abs(shifted - (base + c))) < 1e-10


def test_small_matrices():
    one = spectra.eigen_symmetric(np.array([[3.5]]))
    assert one.values[0] == 3.5
    two = spectra.eigen_symmetric(np.array([[0.0, 1.0], [1.0, 0.0]]))
    assert np.allclose(two.values, [-1.0, 1.0], atol=1e-14)


def test_sturm_count_against_solver():
    h = _random_symmetric(30, 5)
    t = spectra.householder_tridiagonalize(h)
    vals = spectra.eigen_tridiagonal(t).values
    for x in (-3.0, -0.5, 0.1, 2.0, 10.0):
        assert spectra.sturm_count(t, x) == int(np.sum(vals < x))


def test_sturm_bisection_oracle_agrees_with_ql():
    h = _random_symmetric(25, 8)
    t = spectra.householder_tridiagonalize(h)
    ql = spectra.eigen_tridiagonal(t).values
    bis = spectra.sturm_bisection_eigenvalues(t)
    assert np.max(np.abs(ql - bis)) < 1e-9


@given(st.integers(min_value=2, max_value=12), st.integers(min_value=0, max_value=10 ** 6))
@settings(max_examples=30, deadline=None)
def test_eigenvalues_sorted_and_trace_preserved(n, seed):
    h = _random_symmetric(n, seed)
    s = spectra.eigen_symmetric(h)
    assert np.all(np.diff(s.values) >= 0.0)
    assert np.sum(s.values) == pytest.approx(np.trace(h), abs=1e-9 * n)


def test_empirical_stieltjes():
    s = spectra.Spectrum(values=np.array([-1.0, 0.0, 1.0]))
    z = 0.5 + 1.0j
    expect = np.mean(1.0 / (s.values - z))
    assert spectra.empirical_stieltjes(s, z) == pytest.approx(expect)
    with pytest.raises(DomainError):
        spectra.empirical_stieltjes(s, 0.5)


def test_rigidity_residual_zero_at_classical_locations():
    from rmtlab import semicircle

    s = spectra.Spectrum(values=semicircle.classical_locations(50))
    assert spectra.rigidity_residual(s) == 0.0
