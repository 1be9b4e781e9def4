import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from gribov import jacobi
from gribov.bargmann import CoeffVector, GribovParams, build_hamiltonian
from gribov.errors import InvalidTruncationError, LowerBoundViolation, ParameterError


def perturbative(mu, lam, n):
    """Second-order Rayleigh-Schrodinger sum over the two neighbours of level n."""
    v_up = 1j * lam * n * math.sqrt(n + 1)        # <n|V|n+1> = <n+1|V|n>
    v_down = 1j * lam * (n - 1) * math.sqrt(n)    # <n|V|n-1>
    second = v_up**2 / (mu * n - mu * (n + 1))
    if n > 1:
        second += v_down**2 / (mu * n - mu * (n - 1))
    return mu * n + second.real


def test_perturbative_closed_form():
    for n in range(1, 6):
        assert perturbative(1.0, 0.1, n) == pytest.approx(n + 0.01 * n * (3 * n - 1))


@pytest.mark.parametrize("lam, rel", [(0.05, 0.10), (0.1, 0.05)])
def test_weak_coupling(lam, rel):
    w = jacobi.eigenvalues(GribovParams(1.0, lam), 256, 4)
    for n, s in enumerate(w, start=1):
        assert abs(s.real - perturbative(1.0, lam, n)) <= rel * perturbative(1.0, lam, n)


@settings(max_examples=20, deadline=None)
@given(st.floats(0.1, 5), st.integers(1, 6))
def test_lambda_zero_exact(mu, k):
    n = k + 2
    w = jacobi.eigenvalues(GribovParams(mu, 0.0), n, k)
    np.testing.assert_array_equal(w.real, mu * np.arange(1, k + 1))


def test_self_convergence(half):
    rep = jacobi.convergence_study(half, [64, 128, 256, 512], 3)
    s = [row[1][0] for row in rep.convergence]
    assert abs(s[-1] - s[-2]) / abs(s[-1]) <= 1e-8
    assert rep.converged_mask.all()
    digits = jacobi.converged_digits(rep)
    assert digits.shape == (3, 3) and digits[-1, 0] >= 8


def test_eigenpair_residuals(pairs_256):
    accepted = [p for p in pairs_256 if p.converged]
    for p in accepted:
        assert p.residual <= jacobi.TOL_CONVERGED * abs(p.sigma)
        assert p.vector.in_b0()
    assert pairs_256[0].residual <= 1e-14


def _charpoly_root(mu, lam, trunc, lo, hi, digits=40):
    """Bisection on det(M - s) of the B0 block in extended precision."""
    mp.mp.dps = digits
    mu, lam = mp.mpf(mu), mp.mpf(lam)

    def det(s):
        # three-term recurrence; (i lam)^2 = -lam^2 flips the usual sign
        prev, cur = mp.mpf(1), mu - s
        for n in range(2, trunc):
            prev, cur = cur, (mu * n - s) * cur + (lam * (n - 1)) ** 2 * n * prev
        return cur

    a, b = mp.mpf(lo), mp.mpf(hi)
    sa = mp.sign(det(a))
    assert sa != mp.sign(det(b))
    for _ in range(100):
        m = (a + b) / 2
        if mp.sign(det(m)) == sa:
            a = m
        else:
            b = m
    return float((a + b) / 2)


def test_polished_eigenvalues_match_extended_precision():
    p = GribovParams(1.0, 0.5)
    raw = jacobi.eigenvalues(p, 128, 6, polish=False).real
    pol = jacobi.eigenvalues(p, 128, 6).real
    exact = np.array([_charpoly_root(1.0, 0.5, 128, x * (1 - 1e-6), x * (1 + 1e-6)) for x in raw])
    err_pol = np.abs(pol - exact) / exact
    err_raw = np.abs(raw - exact) / exact
    assert err_pol[:4].max() <= 1e-14
    assert np.all(err_pol <= np.maximum(err_raw, 1e-15))


def test_flags_match_reference(pairs_256):
    conv = [p.converged for p in pairs_256]
    assert all(conv[:7])
    assert not all(conv)


def test_sesquilinear_gram_diagonal(pairs_256):
    conv = [p for p in pairs_256 if p.converged][:8]
    g = jacobi.biorthogonality_matrix(conv)
    assert np.array_equal(g, g.conj().T)
    assert jacobi.max_offdiagonal(g, [p.sigma for p in conv]) <= 1e-8
    nu = jacobi.nu_signs(conv)
    assert set(nu) <= {-1, 1}
    ig = jacobi.indefinite_gram(conv, nu)
    assert np.all(np.diag(ig).real > 0)


def test_bilinear_form_is_not_diagonal(pairs_256):
    # the unconjugated pairing does not separate eigenvectors of this operator
    b = jacobi.bilinear_parity_matrix(pairs_256[:8])
    assert jacobi.max_offdiagonal(b, [p.sigma for p in pairs_256[:8]]) > 1e-3


def test_lambda_zero_gram_is_parity():
    pairs = jacobi.eigen_spectrum(build_hamiltonian(GribovParams(2.0, 0.0), 12), 6)
    g = jacobi.biorthogonality_matrix(pairs)
    np.testing.assert_allclose(g, np.diag([(-1) ** n for n in range(1, 7)]), atol=1e-15)


def test_completeness_projection(pairs_256):
    target = CoeffVector(np.r_[0.0, 1.0, 1.0, np.zeros(253)])
    res = jacobi.completeness_residual(pairs_256[:40], target)
    assert np.all(np.diff(res.residuals) <= 0)
    assert res.first_below(1e-6) is not None


def test_completeness_needs_b0(pairs_256):
    with pytest.raises(ParameterError):
        jacobi.completeness_residual(pairs_256, CoeffVector(np.r_[1.0, np.zeros(255)]))


def test_lower_bound_and_reality(pairs_256, half):
    chk = jacobi.lower_bound_check(pairs_256, half)
    assert chk.passed and chk.min_re >= 1.0
    worst, ok = jacobi.reality_check(pairs_256)
    assert ok and worst <= 1e-8


def test_lower_bound_violation_raises():
    fake = [jacobi.EigenPair(0.5 + 0j, CoeffVector(np.zeros(3)), 0.0, 0.0, True)]
    with pytest.raises(LowerBoundViolation):
        jacobi.lower_bound_check(fake, GribovParams(1.0, 0.5))


def test_k_out_of_range():
    with pytest.raises(InvalidTruncationError):
        jacobi.eigen_spectrum(build_hamiltonian(GribovParams(1.0, 0.5), 8), 8)


def test_flipped_lambda_same_spectrum():
    a = jacobi.eigenvalues(GribovParams(1.0, 0.5), 128, 5)
    b = jacobi.eigenvalues(GribovParams(1.0, -0.5), 128, 5)
    np.testing.assert_allclose(a, b, rtol=1e-10)
