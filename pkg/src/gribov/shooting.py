"""Shooting on the negative imaginary axis.

On ``z = -i y`` with ``u(y) = phi(-i y)`` the eigenvalue equation becomes

    u'' = (y + rho) u' - sigma / (lam y) u,   y > 0.

The admissible solution behaves like ``y`` at 0 and tends to a constant at
infinity, while a generic solution grows like ``exp(y**2/2 + rho y)``.  With
``E(y) = y**2/2 + rho y`` the scaled pair ``U = exp(-E) u``, ``G = exp(-E) u'``
obeys

    U' = -(y + rho) U + G,    G' = -sigma / (lam y) U,

which stays O(1) for any ``sigma``.  The growth indicator is ``G(Y)``: it
tends to a non-zero constant unless ``sigma`` is an eigenvalue.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import solve_ivp
from scipy.optimize import brentq

from .bargmann import GribovParams
from .errors import ConfigurationError, NoRootError, StiffnessError


@dataclass(frozen=True)
class ShootingConfig:
    eps: float = 1e-3
    series_terms: int = 20
    Y: float | None = None
    rtol: float = 1e-10
    atol: float = 1e-16
    tol_sigma: float = 1e-9
    n_samples: int = 201

    def __post_init__(self):
        if not (self.eps > 0 and self.rtol > 0 and self.atol > 0 and self.tol_sigma > 0):
            raise ConfigurationError("shooting tolerances and eps must be positive")
        if self.series_terms < 2 or self.n_samples < 2:
            raise ConfigurationError("series_terms and n_samples must be >= 2")

    def end_point(self, rho: float) -> float:
        return self.Y if self.Y is not None else max(8.0, rho + 6.0)


@dataclass(frozen=True, eq=False)
class ShootingResult:
    sigma: float
    growth_indicator: float
    y: np.ndarray
    u_scaled: np.ndarray
    up_scaled: np.ndarray
    converged: bool
    iterations: int
    rho: float
    bracket: tuple[float, float] = field(default=(np.nan, np.nan))

    @property
    def weight(self) -> np.ndarray:
        """``E(y) = y**2/2 + rho y`` on the sample grid."""
        return self.y**2 / 2 + self.rho * self.y

    def unscaled(self, y_max: float | None = None) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """``y, u, u'`` on ``[eps, y_max]``.

        Past a few units of ``y`` the tiny residual of the dominant mode,
        ``growth_indicator * exp(E)``, exceeds the solution itself, so callers
        should pick ``y_max`` with that in mind.
        """
        sel = self.y <= (y_max if y_max is not None else self.y[-1])
        w = np.exp(self.weight[sel])
        return self.y[sel], self.u_scaled[sel] * w, self.up_scaled[sel] * w

    def trusted_range(self, tol: float = 1e-6) -> float:
        """Largest sample ``y`` where the dominant-mode contamination is below ``tol``."""
        if self.growth_indicator == 0.0:
            return float(self.y[-1])
        log_contamination = np.log(abs(self.growth_indicator)) + self.weight
        ok = np.nonzero(log_contamination <= np.log(tol))[0]
        return float(self.y[ok[-1]]) if ok.size else float(self.y[0])

    def to_csv(self, y_max: float | None = None) -> str:
        y, u, up = self.unscaled(y_max)
        buf = io.StringIO()
        writer = csv.writer(buf)
        writer.writerow(["y", "u_re", "u_im", "up_re", "up_im"])
        for row in zip(y, u, up):
            writer.writerow([repr(float(row[0])), repr(float(row[1])), 0.0, repr(float(row[2])), 0.0])
        return buf.getvalue()


def axis_series(params: GribovParams, sigma: float, y: float, n_terms: int) -> tuple[float, float]:
    """``u(y), u'(y)`` from the analytic series ``u = y sum b_m y**m``.

    ``(m+1) m b_m = (rho m - sigma/lam) b_{m-1} + (m-1) b_{m-2}``.
    """
    rho, sl = params.rho, sigma / params.lam
    b = np.zeros(n_terms)
    b[0] = 1.0
    for m in range(1, n_terms):
        prev2 = b[m - 2] if m >= 2 else 0.0
        b[m] = ((rho * m - sl) * b[m - 1] + (m - 1) * prev2) / ((m + 1) * m)
    powers = y ** np.arange(n_terms)
    u = float(np.sum(b * powers) * y)
    up = float(np.sum((np.arange(n_terms) + 1) * b * powers))
    return u, up


def _integrate(params: GribovParams, sigma: float, config: ShootingConfig, t_eval=None):
    rho, lam = params.rho, params.lam
    eps = config.eps
    Y = config.end_point(rho)
    u0, up0 = axis_series(params, sigma, eps, config.series_terms)
    e0 = np.exp(-(eps * eps / 2 + rho * eps))

    def rhs(y, v):
        return [-(y + rho) * v[0] + v[1], -sigma / (lam * y) * v[0]]

    sol = solve_ivp(
        rhs, (eps, Y), [u0 * e0, up0 * e0], method="RK45",
        rtol=config.rtol, atol=config.atol, t_eval=t_eval,
    )
    if not sol.success:
        raise StiffnessError(
            f"integrator failed at sigma={sigma}: {sol.message}; try a smaller Y or looser rtol"
        )
    return sol


def growth_indicator(params: GribovParams, sigma: float, config: ShootingConfig | None = None) -> float:
    """``exp(-Y**2/2 - rho Y) u'(Y)`` for the solution that behaves like ``y`` at 0."""
    params.require_positive("shooting")
    config = config or ShootingConfig()
    return float(_integrate(params, sigma, config).y[1, -1])


def scan_brackets(
    params: GribovParams, sigma_max: float, n_grid: int = 200, config: ShootingConfig | None = None,
    sigma_min: float | None = None,
) -> list[tuple[float, float]]:
    """Sign changes of the growth indicator on a uniform grid."""
    params.require_positive("shooting")
    lo = sigma_min if sigma_min is not None else 0.5 * params.mu
    grid = np.linspace(lo, sigma_max, n_grid)
    vals = np.array([growth_indicator(params, s, config) for s in grid])
    return [
        (float(grid[i]), float(grid[i + 1]))
        for i in range(n_grid - 1)
        if np.sign(vals[i]) != np.sign(vals[i + 1])
    ]


def shoot_eigenvalue(
    params: GribovParams, bracket: tuple[float, float], config: ShootingConfig | None = None
) -> ShootingResult:
    params.require_positive("shooting")
    config = config or ShootingConfig()
    lo, hi = float(bracket[0]), float(bracket[1])
    d_lo = growth_indicator(params, lo, config)
    d_hi = growth_indicator(params, hi, config)
    if d_lo == 0.0:
        hi = lo
    elif d_hi == 0.0:
        lo = hi
    elif np.sign(d_lo) == np.sign(d_hi):
        raise NoRootError(f"growth indicator has the same sign at {lo} and {hi} ({d_lo:.3g}, {d_hi:.3g})")
    if lo == hi:
        sigma, iters, converged = lo, 0, True
    else:
        sigma, info = brentq(
            lambda s: growth_indicator(params, s, config), lo, hi,
            xtol=config.tol_sigma * max(1.0, abs(lo)) * 1e-2, rtol=4 * np.finfo(float).eps,
            full_output=True, disp=False,
        )
        iters, converged = info.iterations, bool(info.converged)
    Y = config.end_point(params.rho)
    t_eval = np.linspace(config.eps, Y, config.n_samples)
    sol = _integrate(params, sigma, config, t_eval=t_eval)
    return ShootingResult(
        sigma=float(sigma),
        growth_indicator=float(sol.y[1, -1]),
        y=sol.t,
        u_scaled=sol.y[0],
        up_scaled=sol.y[1],
        converged=converged,
        iterations=int(iters),
        rho=float(params.rho),
        bracket=(float(bracket[0]), float(bracket[1])),
    )


def shoot_spectrum(
    params: GribovParams, k: int, config: ShootingConfig | None = None, sigma_max: float | None = None,
    n_grid: int | None = None,
) -> list[ShootingResult]:
    """Lowest ``k`` eigenvalues from a bracket scan followed by root refinement."""
    params.require_positive("shooting")
    lam, mu = params.lam, params.mu
    # crude upper estimate from the small-coupling formula, widened
    guess = mu * k + (lam * lam / mu) * k * (3 * k - 1)
    top = sigma_max if sigma_max is not None else 1.5 * guess + 2 * mu
    grid = n_grid if n_grid is not None else max(30, 10 * k)
    brackets = scan_brackets(params, top, grid, config)
    while len(brackets) < k and sigma_max is None:
        top *= 1.6
        grid = int(grid * 1.6)
        brackets = scan_brackets(params, top, grid, config)
        if top > 1e4 * guess:
            break
    if len(brackets) < k:
        raise NoRootError(f"found only {len(brackets)} sign changes below sigma={top}")
    return [shoot_eigenvalue(params, b, config) for b in brackets[:k]]
