import math

import numpy as np
import pytest
import sympy as sp
from hypothesis import given, settings, strategies as st

from gribov import heun
from gribov.bargmann import GribovParams
from gribov.errors import InvalidTruncationError, LogarithmicCaseError

z, xi = sp.symbols("z xi")


def _sympy_series_coeffs(ode, var, exponent, n_terms):
    """Solve the coefficient equations of ``var**exponent * sum a_n var**n`` one by one."""
    a = sp.symbols(f"a0:{n_terms}")
    trial = var**exponent * sum(a[n] * var**n for n in range(n_terms))
    # x f'' lowers the power by one: a_n first appears at var**(exponent + n - 1)
    expr = sp.expand(sp.powsimp(sp.expand(ode(trial) * var ** (1 - exponent))))
    sol = {a[0]: 1}
    for n in range(1, n_terms):
        eq = expr.coeff(var, n).subs(sol)
        sol[a[n]] = sp.solve(eq, a[n])[0]
    return [complex(sp.N(sol[a[n]])) for n in range(n_terms)]


def test_frobenius_against_sympy():
    mu, lam, sigma = sp.Rational(1), sp.Rational(1, 2), sp.Rational(13, 10)

    def ode(f):
        return sp.I * lam * z * sp.diff(f, z, 2) + (mu * z + sp.I * lam * z**2) * sp.diff(f, z) - sigma * f

    ref = _sympy_series_coeffs(ode, z, 1, 8)
    got = heun.frobenius_coefficients(GribovParams(1.0, 0.5), 1.3, 8).coeffs
    np.testing.assert_allclose(got, ref, rtol=1e-12, atol=1e-15)


@settings(max_examples=30, deadline=None)
@given(st.floats(0.1, 3), st.floats(0.1, 2), st.floats(0.0, 10), st.floats(-1.5, 1.5), st.floats(-1.5, 1.5))
def test_frobenius_residual(mu, lam, sigma, x, y):
    p = GribovParams(mu, lam)
    sol = heun.frobenius_coefficients(p, sigma, 80)
    zz = complex(x, y)
    f, f1, f2 = sol.derivatives(zz)
    # individual terms can dwarf f when rho is large, so scale by term sizes
    n = np.arange(sol.coeffs.size) + 1
    terms = np.abs(sol.coeffs) * abs(zz) ** n
    scale = 1 + np.sum(terms * (sigma + mu * n + lam * n * (n + abs(zz))))
    assert abs(heun.eigen_equation_residual(p, sigma, f, f1, f2, zz)) <= 1e-10 * scale


def test_frobenius_log_branch():
    p = GribovParams(1.0, 0.5)
    with pytest.raises(LogarithmicCaseError):
        heun.frobenius_coefficients(p, 1.3, 10, exponent=0)
    vac = heun.frobenius_coefficients(p, 0.0, 10, exponent=0)
    assert vac.coeffs[0] == 1 and not vac.coeffs[1:].any()
    with pytest.raises(InvalidTruncationError):
        heun.frobenius_coefficients(p, 1.3, 1)


def test_heun_reduction_symbolic():
    mu, lam, sigma = sp.symbols("mu lam sigma", positive=True)
    u = sp.Function("u")
    rho = mu / lam
    zz = sp.I * sp.sqrt(2) * xi
    # phi(z) = u(xi): d/dz = 1/(i sqrt 2) d/dxi
    d1 = sp.diff(u(xi), xi) / (sp.I * sp.sqrt(2))
    d2 = sp.diff(u(xi), xi, 2) / (sp.I * sp.sqrt(2)) ** 2
    eig = sp.I * lam * zz * d2 + (mu * zz + sp.I * lam * zz**2) * d1 - sigma * u(xi)
    a, b, g, d = -1, -rho * sp.sqrt(2), 1, 2 * sp.sqrt(2) * sigma / lam
    bhe = xi * sp.diff(u(xi), xi, 2) + (1 + a - b * xi - 2 * xi**2) * sp.diff(u(xi), xi) + (
        (g - a - 2) * xi - (d + (1 + a) * b) / 2
    ) * u(xi)
    assert sp.simplify(eig - lam / sp.sqrt(2) * bhe) == 0
    p = heun.gribov_bhe_params(GribovParams(1.0, 0.5), 1.3)
    np.testing.assert_allclose(p.astuple(), (-1, -2 * math.sqrt(2), 1, 2 * math.sqrt(2) * 1.3 / 0.5))


def _bhe_ode(a, b, g, d):
    def ode(f):
        return xi * sp.diff(f, xi, 2) + (1 + a - b * xi - 2 * xi**2) * sp.diff(f, xi) + (
            (g - a - 2) * xi - (d + (1 + a) * b) / 2
        ) * f
    return ode


@pytest.mark.parametrize("params", [
    (sp.Rational(1, 2), 0, 2, 0),
    (sp.Rational(1, 3), sp.Rational(1, 2), sp.Rational(3, 2), sp.Rational(-1, 4)),
    (sp.Rational(-2, 5), 1, 0, 2),
])
def test_bhe_zero_branches_against_sympy(params):
    a, b, g, d = params
    p = heun.BheParams(*(complex(v) for v in params))
    ref0 = _sympy_series_coeffs(_bhe_ode(a, b, g, d), xi, 0, 7)
    np.testing.assert_allclose(heun.bhe_series_at_zero(p, 7, 0).coeffs, ref0, rtol=1e-12, atol=1e-14)
    ref1 = _sympy_series_coeffs(_bhe_ode(a, b, g, d), xi, -a, 7)
    np.testing.assert_allclose(heun.bhe_series_at_zero(p, 7, 1).coeffs, ref1, rtol=1e-12, atol=1e-14)


def test_bhe_known_coefficient():
    # (1/2, 0, 2, 0): A_2 = -(g - 2 - a)(1 + a) = 3/4
    A = heun.bhe_recurrence_coefficients(heun.BheParams(0.5, 0, 2, 0), 3)
    assert A[1] == 0 and A[2] == pytest.approx(0.75)


def test_bhe_integer_alpha_is_logarithmic():
    with pytest.raises(LogarithmicCaseError):
        heun.bhe_series_at_zero(heun.BheParams(-1, 0.3, 1, 0.2), 5, 1)


def _laurent_residual(ode, trial, var, exponent, keep):
    expr = sp.expand(sp.powsimp(sp.expand(ode(trial) * var ** (-exponent))))
    return [sp.nsimplify(expr.coeff(var, k)) for k in range(1, 1 - keep, -1)]


@pytest.mark.parametrize("params", [
    (sp.Rational(1, 3), sp.Rational(1, 2), sp.Rational(3, 2), sp.Rational(-1, 4)),
    (sp.Rational(-1), -sp.Rational(7, 5), 1, sp.Rational(9, 2)),
])
def test_thome_recessive_symbolic(params):
    a, b, g, d = params
    n = 6
    c = heun.thome_coefficients(heun.BheParams(*(complex(v) for v in params)), n)
    cs = [sp.nsimplify(round(v.real, 14)) for v in c]
    e = sp.Rational(g - a - 2, 2)
    trial = xi**e * sum(cs[k] * xi ** (-k) for k in range(n))
    # the first n powers of the Laurent residual vanish
    res = _laurent_residual(_bhe_ode(a, b, g, d), trial, xi, e, n)
    assert all(abs(complex(r)) < 1e-10 for r in res)


def test_thome_dominant_symbolic():
    a, b, g, d = sp.Rational(1, 3), sp.Rational(1, 2), sp.Rational(3, 2), sp.Rational(-1, 4)
    n = 6
    _, dom = heun.thome_series_at_infinity(heun.BheParams(*(complex(v) for v in (a, b, g, d))), n)
    cs = [sp.nsimplify(round(v.real, 14)) + sp.I * sp.nsimplify(round(v.imag, 14)) for v in dom.coeffs]
    e = -sp.Rational(g + a + 2, 2)
    series = xi**e * sum(cs[k] * (sp.I * xi) ** (-k) for k in range(n))
    f = sp.exp(xi**2 + b * xi) * series
    expr = sp.expand(sp.simplify(_bhe_ode(a, b, g, d)(f) * sp.exp(-(xi**2 + b * xi))) * xi ** (-e))
    # leading power is xi**3; the next n powers cancel
    for k in range(3, 3 - n, -1):
        assert abs(complex(sp.N(expr.coeff(xi, k)))) < 1e-10


def test_thome_evaluation_truncates_at_smallest_term():
    p = heun.gribov_bhe_params(GribovParams(1.0, 0.5), 1.3)
    rec, _ = heun.thome_series_at_infinity(p, 60)
    val, err = rec.evaluate_with_error(8.0)
    assert np.isfinite(val) and 0 <= err < 1e-3 * abs(val)


def test_z_chart_recessive_matches_xi_chart():
    params = GribovParams(1.0, 0.5)
    sigma = 1.3
    az = heun.recessive_series_z(params, sigma, 10)
    axi = heun.thome_coefficients(heun.gribov_bhe_params(params, sigma), 10)
    np.testing.assert_allclose(az, axi * (1j * math.sqrt(2)) ** np.arange(10), rtol=1e-12)


def test_series_json_roundtrip_keys():
    sol = heun.frobenius_coefficients(GribovParams(1.0, 0.5), 1.3, 5)
    d = sol.to_dict()
    assert {"exponent", "coeffs"} <= set(d)
    assert len(d["coeffs"]) == 5
