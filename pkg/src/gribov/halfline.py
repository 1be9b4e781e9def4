"""Half-line Schrodinger form of the eigenvalue problem.

On the negative imaginary axis ``u(y) = phi(-i y)`` solves

    lam y u'' - lam y (y + rho) u' + sigma u = 0.

Writing ``u = exp((y + rho)**2 / 4) v`` removes the first derivative, and
``y = x**2``, ``v = x**(1/2) w`` turns the result into

    -(lam/4) w'' + V(x) w = sigma w,
    V(x) = (lam/4) [ (3/4) / x**2 + x**2 ((x**2 + rho)**2 - 2) ],

a symmetric problem on ``(0, inf)`` with ``w ~ x**(3/2)`` at 0 and
``w ~ x**(-1/2) exp(-(x**2 + rho)**2 / 4)`` at infinity.
"""

from __future__ import annotations

import csv
import io
import time
from dataclasses import dataclass

import numpy as np
from scipy.linalg import eigh_tridiagonal

from .bargmann import GribovParams
from .errors import ConfigurationError, DomainTruncationError
from .report import EigenvalueEntry, SpectralReport
from .shooting import axis_series


def potential(params: GribovParams, x):
    lam, rho = params.lam, params.rho
    x = np.asarray(x, dtype=float)
    x2 = x * x
    return (lam / 4) * (0.75 / x2 + x2 * ((x2 + rho) ** 2 - 2))


def default_extent(params: GribovParams, sigma_max: float) -> float:
    """``max(4, (2 sigma_max / lam)**(1/6) + rho**(1/2) + 2)``."""
    return max(4.0, (2 * max(sigma_max, 0.0) / params.lam) ** (1 / 6) + np.sqrt(params.rho) + 2)


@dataclass(frozen=True, eq=False)
class HalfLineProblem:
    """Three-point discretization with Dirichlet ends at 0 and ``X``."""

    params: GribovParams
    X: float
    M: int

    @property
    def h(self) -> float:
        return self.X / (self.M + 1)

    @property
    def x(self) -> np.ndarray:
        return self.h * np.arange(1, self.M + 1)

    @property
    def scale(self) -> float:
        return self.params.lam / 4

    @property
    def V(self) -> np.ndarray:
        return potential(self.params, self.x)

    def bands(self) -> tuple[np.ndarray, np.ndarray]:
        c = self.scale / self.h**2
        return self.V + 2 * c, np.full(self.M - 1, -c)

    def to_dense(self) -> np.ndarray:
        d, e = self.bands()
        return np.diag(d) + np.diag(e, 1) + np.diag(e, -1)

    def refined(self) -> "HalfLineProblem":
        """Same interval with step ``h/2``; the old nodes are a subset of the new."""
        return HalfLineProblem(self.params, self.X, 2 * self.M + 1)


def build_problem(
    params: GribovParams, X: float | None = None, M: int = 4000, sigma_max: float | None = None,
    margin: float = 10.0,
) -> HalfLineProblem:
    params.require_positive("the half-line problem")
    if M < 100:
        raise ConfigurationError(f"need at least 100 grid points, got {M}")
    top = sigma_max if sigma_max is not None else 10 * params.mu
    if X is None:
        X = default_extent(params, top)
    vx = float(potential(params, X))
    if vx < top + margin:
        raise DomainTruncationError(
            f"V(X={X}) = {vx:.4g} is below sigma_max + margin = {top + margin:.4g}; enlarge X"
        )
    return HalfLineProblem(params, float(X), int(M))


def _lowest(problem: HalfLineProblem, k: int, vectors: bool):
    if not 1 <= k < problem.M:
        raise ConfigurationError(f"k must lie in 1..{problem.M - 1}")
    d, e = problem.bands()
    return eigh_tridiagonal(d, e, eigvals_only=not vectors, select="i", select_range=(0, k - 1))


@dataclass(frozen=True, eq=False)
class SturmResult:
    values: np.ndarray
    coarse: np.ndarray
    fine: np.ndarray
    M: int
    X: float

    @property
    def error_estimate(self) -> np.ndarray:
        return np.abs(self.values - self.fine)


def sturm_eigenvalues(problem: HalfLineProblem, k: int, extrapolate: bool = True) -> SturmResult:
    """Lowest ``k`` eigenvalues; Richardson over ``h`` and ``h/2`` when asked."""
    coarse = _lowest(problem, k, vectors=False)
    if not extrapolate:
        return SturmResult(coarse, coarse, coarse, problem.M, problem.X)
    fine = _lowest(problem.refined(), k, vectors=False)
    return SturmResult((4 * fine - coarse) / 3, coarse, fine, problem.M, problem.X)


def sturm_spectrum(
    params: GribovParams, k: int, M: int = 4000, X: float | None = None, tol_shift: float = 1e-7,
    max_doublings: int = 4,
) -> tuple[SturmResult, SpectralReport]:
    """Extrapolated eigenvalues with automatic grid doubling.

    Doubling stops once the top requested eigenvalue moves by less than
    ``tol_shift`` (relative).  Eigenvalues are flagged converged when they
    moved by less than ``tol_shift`` on the final doubling.
    """
    t0 = time.perf_counter()
    first = sturm_eigenvalues(build_problem(params, X, M), k, extrapolate=True)
    sigma_max = float(first.values[-1])
    if X is None:
        X = default_extent(params, sigma_max)
    problem = build_problem(params, X, M, sigma_max=sigma_max)
    res = sturm_eigenvalues(problem, k)
    rows = [(problem.M, tuple(complex(v) for v in res.values))]
    shift = np.full(k, np.inf)
    for _ in range(max_doublings):
        problem = HalfLineProblem(params, problem.X, 2 * problem.M)
        new = sturm_eigenvalues(problem, k)
        shift = np.abs(new.values - res.values) / np.abs(new.values)
        res = new
        rows.append((problem.M, tuple(complex(v) for v in res.values)))
        if shift[-1] < tol_shift:
            break
    conv = shift < tol_shift
    report = SpectralReport(
        method="sturm", params=params,
        trunc={"M": problem.M, "X": problem.X, "richardson": True},
        eigenvalues=tuple(
            EigenvalueEntry(complex(v), float(e), bool(c)) for v, e, c in zip(res.values, res.error_estimate, conv)
        ),
        convergence=tuple(rows), wall_time=time.perf_counter() - t0,
    )
    return res, report


def eigenfunctions(problem: HalfLineProblem, k: int) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues and unit-norm ``w`` samples (columns), positive near 0."""
    vals, vecs = _lowest(problem, k, vectors=True)
    vecs = vecs / np.sqrt(problem.h)
    vecs = vecs * np.sign(vecs[0])[None, :]
    return vals, vecs


@dataclass(frozen=True)
class TransformChain:
    """Maps between ``u(y)``, ``v(y)`` and ``w(x)`` with ``y = x**2``."""

    rho: float

    def u_to_v(self, y, u):
        return np.exp(-((np.asarray(y) + self.rho) ** 2) / 4) * u

    def v_to_u(self, y, v):
        return np.exp(((np.asarray(y) + self.rho) ** 2) / 4) * v

    def v_to_w(self, x, v):
        return np.asarray(v) / np.sqrt(x)

    def w_to_v(self, x, w):
        return np.sqrt(x) * np.asarray(w)

    def u_to_w(self, x, u):
        x = np.asarray(x)
        return self.v_to_w(x, self.u_to_v(x * x, u))

    def w_to_u(self, x, w):
        x = np.asarray(x)
        return self.v_to_u(x * x, self.w_to_v(x, w))

    def log_u_from_w(self, x, w):
        """``log|u|`` computed without forming ``exp((y + rho)**2 / 4)``."""
        x = np.asarray(x)
        with np.errstate(divide="ignore"):
            return ((x * x + self.rho) ** 2) / 4 + 0.5 * np.log(x) + np.log(np.abs(w))


def eigenfunction_transform(
    problem: HalfLineProblem, w: np.ndarray, sigma: float | None = None, rel_floor: float = 1e-10
) -> tuple[np.ndarray, np.ndarray]:
    """``y, u`` with ``u(y) = exp((y + rho)**2/4) x**(1/2) w(x)`` at ``x = sqrt(y)``.

    Samples where ``|w|`` falls below ``rel_floor`` times its maximum carry no
    information (the grid error is absolute) and come back as NaN.

    ``u`` is scaled so that ``u(y) / y -> 1`` at 0.  The first few nodes feel
    the ``x**(3/2)`` singularity most, so with ``sigma`` given the scale is
    fitted against the series at 0 over ``0.1 <= x <= 0.5``; otherwise the
    node nearest ``x = 0.1`` is matched to ``u = y``.
    """
    x = problem.x
    chain = TransformChain(problem.params.rho)
    good = np.abs(w) > rel_floor * np.abs(w).max()
    logu = np.where(good, chain.log_u_from_w(x, np.where(good, w, 1.0)), np.nan)
    raw = np.sign(w) * np.exp(logu - np.nanmax(logu[: max(1, problem.M // 4)]))
    y = x * x
    if sigma is None:
        j = int(np.argmin(np.abs(x - 0.1)))
        return y, raw * (y[j] / raw[j])
    band = (x >= 0.1) & (x <= 0.5) & good
    ref = np.array([axis_series(problem.params, sigma, yy, 40)[0] for yy in y[band]])
    scale = float(np.dot(ref, raw[band]) / np.dot(raw[band], raw[band]))
    return y, raw * scale


@dataclass(frozen=True)
class BoundaryFit:
    slope_at_zero: float
    decay_rate: float
    log_u_spread: float
    phase_span: float
    window: tuple[float, float]


def boundary_fit(problem: HalfLineProblem, w: np.ndarray, n_small: int = 10, rel_floor: float = 1e-8) -> BoundaryFit:
    """Fits against the two boundary behaviours.

    Near 0: slope of ``log|w|`` against ``log x`` on the first ``n_small``
    nodes (expected 3/2).

    Far out: ``log|w| + (1/2) log x`` regressed on ``Phi = (x**2 + rho)**2 / 4``
    with ``1, 1/y, 1/y**2`` as nuisance terms; the coefficient of ``Phi`` is
    ``-decay_rate`` (expected 1).  The window starts past the last sign change
    and keeps ``|w| > rel_floor * max|w|``.  ``log_u_spread`` is the range of
    ``log|w| + Phi + (1/2) log x`` over that window, to be compared with
    ``phase_span``, the range of ``Phi``.
    """
    x = problem.x
    rho = problem.params.rho
    slope = float(np.polyfit(np.log(x[:n_small]), np.log(np.abs(w[:n_small])), 1)[0])
    ok = np.abs(w) > rel_floor * np.abs(w).max()
    wo = np.where(ok, w, np.nan)
    flips = np.nonzero(np.sign(wo[1:]) * np.sign(wo[:-1]) < 0)[0]
    x0 = x[flips[-1] + 1] if flips.size else x[n_small]
    win = ok & (x > x0 + 0.3)
    if win.sum() < 8:
        raise DomainTruncationError("too few samples in the decay window; refine the grid")
    xs = x[win]
    ys = xs * xs
    phi = (ys + rho) ** 2 / 4
    lhs = np.log(np.abs(w[win])) + 0.5 * np.log(xs)
    design = np.column_stack([phi, np.ones_like(xs), 1 / ys, 1 / ys**2])
    coef = np.linalg.lstsq(design, lhs, rcond=None)[0]
    g = lhs + phi
    return BoundaryFit(
        slope_at_zero=slope,
        decay_rate=float(-coef[0]),
        log_u_spread=float(np.ptp(g)),
        phase_span=float(np.ptp(phi)),
        window=(float(xs[0]), float(xs[-1])),
    )


def eigenfunction_csv(problem: HalfLineProblem, w: np.ndarray, sigma: float | None = None) -> str:
    y, u = eigenfunction_transform(problem, w, sigma)
    buf = io.StringIO()
    wr = csv.writer(buf)
    wr.writerow(["x", "w", "y", "u"])
    for row in zip(problem.x, w, y, u):
        wr.writerow([repr(float(v)) for v in row])
    return buf.getvalue()
