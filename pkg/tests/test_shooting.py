import numpy as np
import pytest

from gribov import jacobi, shooting
from gribov.bargmann import GribovParams
from gribov.errors import NoRootError, ParameterError

SIGMA1 = 1.3177075503317705  # lowest (1, 0.5) eigenvalue, extended-precision root at N = 256


def test_axis_series_matches_ode():
    p = GribovParams(1.0, 0.5)
    sigma, h = 1.3, 1e-4
    y = 0.4
    u0, up0 = shooting.axis_series(p, sigma, y, 40)
    um, _ = shooting.axis_series(p, sigma, y - h, 40)
    uq, _ = shooting.axis_series(p, sigma, y + h, 40)
    upp = (uq - 2 * u0 + um) / h**2
    assert abs(upp - ((y + p.rho) * up0 - sigma / (p.lam * y) * u0)) < 1e-5


def test_lowest_root(half):
    res = shooting.shoot_spectrum(half, 1)[0]
    assert res.converged
    assert abs(res.sigma - SIGMA1) / SIGMA1 <= 1e-6
    assert abs(res.growth_indicator) <= 1e-6


def test_weak_coupling_root():
    res = shooting.shoot_spectrum(GribovParams(1.0, 0.05), 1)[0]
    assert abs(res.sigma - 1.005) <= 0.1 * 1.005


def test_indicator_changes_sign_across_root(half):
    lo = shooting.growth_indicator(half, SIGMA1 - 0.05)
    hi = shooting.growth_indicator(half, SIGMA1 + 0.05)
    assert np.sign(lo) != np.sign(hi)


def test_no_root_in_bracket(half):
    with pytest.raises(NoRootError):
        shooting.shoot_eigenvalue(half, (1.4, 1.5))


def test_requires_positive_params():
    with pytest.raises(ParameterError):
        shooting.growth_indicator(GribovParams(1.0, 0.0), 1.0)


def test_result_outputs(half):
    res = shooting.shoot_eigenvalue(half, (1.2, 1.4))
    y, u, up = res.unscaled(4.0)
    assert y[-1] <= 4.0 and np.all(np.isfinite(u))
    assert res.trusted_range() > 0
    head = res.to_csv(2.0).splitlines()[0]
    assert head == "y,u_re,u_im,up_re,up_im"


def test_agrees_with_jacobi_stronger_coupling():
    p = GribovParams(1.0, 2.0)
    shot = shooting.shoot_spectrum(p, 2)
    ref = jacobi.eigenvalues(p, 1024, 2)  # slower convergence at larger lambda
    for r, s in zip(shot, ref):
        assert abs(r.sigma - s.real) / s.real <= 1e-6
