"""Integral kernels inverting ``H`` on the imaginary axis.

Positive axis (``y, s >= 0``, ``u(y) = phi(-i y)``): with ``E(t) = t**2/2 + rho t``

    N(y, s) = exp(-E(s)) / (lam s) * int_0^{min(y, s)} exp(E(t)) dt

satisfies ``u(y) = int_0^inf N(y, s) (H phi)(-i s) ds`` for admissible ``phi``.
Writing ``R(m) = int_0^m exp(E(t) - E(m)) dt`` gives ``N = R(s) / (lam s)`` for
``s <= y`` and ``N = R(y) exp(E(y) - E(s)) / (lam s)`` for ``s >= y``.

Negative axis (``y, s <= 0``, ``rho > 0``):

    Nn(y, s) = exp(-rho y) (theta(y)/y) (s/theta(s)) exp(s**2/2) J(min(y, s)),
    J(m) = int_{-inf}^m exp(-(u - rho)**2 / 2) / u du  (negative),

with ``theta(y) = y`` on ``[-1, 0]`` and ``-1`` below.  ``J`` is evaluated as
``exp(-(m - rho)**2 / 2) Jhat(m)`` so that the large exponentials cancel
before they are formed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
import scipy.linalg as sla
from scipy.integrate import quad
from scipy.special import dawsn

from .bargmann import GribovParams
from .errors import (
    DivergenceError,
    DomainTruncationError,
    ParameterError,
    PerronViolationError,
    UnsupportedParameterError,
)
from .quadrature import PanelRule, cumulative_matrix, gauss_legendre, panel_rule, uniform_panels
from .report import EigenvalueEntry, SpectralReport

SQRT2 = math.sqrt(2.0)
# exp(-45) ~ 3e-20: envelope cut-off for semi-infinite integrals
ENVELOPE_LOG = 45.0


@dataclass(frozen=True)
class WeightTheta:
    """``theta(y) = y`` on ``[-1, 0]``, ``-1`` below; ``abs`` is the measure density."""

    def __call__(self, y):
        y = np.asarray(y, dtype=float)
        return np.where(y >= -1.0, y, -1.0)

    def abs(self, y):
        return np.abs(self(y))


theta = WeightTheta()


def _exponent(params: GribovParams, t):
    return t * t / 2 + params.rho * t


def _r_series(m: np.ndarray, rho: float, terms: int = 30) -> np.ndarray:
    # R' = 1 - (rho + m) R, R(0) = 0
    r = np.zeros(terms + 1)
    r[1] = 1.0
    for k in range(1, terms):
        r[k + 1] = (-rho * r[k] - r[k - 1]) / (k + 1)
    return np.polynomial.polynomial.polyval(m, r)


def r_function(params: GribovParams, m) -> np.ndarray:
    """``R(m) = int_0^m exp(E(t) - E(m)) dt`` for ``m >= 0`` via Dawson's function."""
    rho = params.rho
    m = np.asarray(m, dtype=float)
    a = (m + rho) / SQRT2
    b = rho / SQRT2
    out = SQRT2 * (dawsn(a) - np.exp(b * b - a * a) * dawsn(b))
    small = m * (rho + 1) < 0.5
    if np.any(small):
        out = np.where(small, _r_series(m, rho), out)
    return out


def kernel_positive_axis(params: GribovParams, y: float, s: float, epsrel: float = 1e-12) -> float:
    """``N(y, s)`` by adaptive quadrature of the inner integral."""
    params.require_positive("the positive-axis kernel")
    if y < 0 or s < 0:
        raise ParameterError(f"positive-axis kernel needs y, s >= 0, got y={y}, s={s}")
    m = min(y, s)
    if m == 0.0:
        return 1.0 / params.lam if (s == 0.0 and y > 0) else 0.0
    es = _exponent(params, s)
    inner, _ = quad(lambda t: math.exp(_exponent(params, t) - es), 0.0, m, epsrel=epsrel, epsabs=0.0, limit=200)
    return inner / (params.lam * s)


def kernel_positive_values(params: GribovParams, y, s) -> np.ndarray:
    """Vectorized ``N(y, s)`` (broadcasting) using ``R``."""
    params.require_positive("the positive-axis kernel")
    y, s = np.broadcast_arrays(np.asarray(y, float), np.asarray(s, float))
    if np.any(y < 0) or np.any(s < 0):
        raise ParameterError("positive-axis kernel needs y, s >= 0")
    m = np.minimum(y, s)
    safe_s = np.where(s > 0, s, 1.0)
    with np.errstate(over="ignore", invalid="ignore"):
        val = r_function(params, m) * np.exp(_exponent(params, m) - _exponent(params, s)) / (params.lam * safe_s)
    limit = np.where(y > 0, 1.0 / params.lam, 0.0)
    return np.where(s > 0, val, limit)


def default_extent(params: GribovParams) -> float:
    return max(8.0, params.rho + 6.0)


@dataclass(frozen=True, eq=False)
class KernelGrid:
    """Quadrature nodes and the discretized integral operator.

    ``operator[i, j]`` maps samples ``f(s_j)`` to ``int N(y_i, s) f(s) ds``.
    On the positive axis it comes from product integration: inside the panel
    holding ``y_i`` each side of the kink ``s = y_i`` is integrated
    separately through the panel's cumulative Gauss-Legendre matrix.
    ``kernel`` holds the raw samples ``N(y_i, s_j)``.
    """

    axis: str
    params: GribovParams
    rule: PanelRule
    kernel: np.ndarray
    operator: np.ndarray
    measure: np.ndarray

    @property
    def nodes(self) -> np.ndarray:
        return self.rule.nodes

    @property
    def weights(self) -> np.ndarray:
        return self.rule.weights

    def to_csv(self) -> str:
        lines = ["y," + ",".join(repr(float(s)) for s in self.nodes)]
        for yi, row in zip(self.nodes, self.kernel):
            lines.append(repr(float(yi)) + "," + ",".join(repr(float(v)) for v in row))
        return "\n".join(lines) + "\n"


def positive_grid(
    params: GribovParams, Y: float | None = None, n_panels: int | None = None, order: int = 32
) -> KernelGrid:
    params.require_positive("the positive-axis kernel")
    Y = default_extent(params) if Y is None else float(Y)
    n_panels = int(math.ceil(Y)) if n_panels is None else int(n_panels)
    rule = uniform_panels(0.0, Y, n_panels, order)
    y, w = rule.nodes, rule.weights
    lam = params.lam
    E = _exponent(params, y)
    R = r_function(params, y)
    below = R / (lam * y)
    q = y.size
    S = cumulative_matrix(order)
    K = np.empty((q, q))
    for i in range(q):
        p = i // order
        il = i % order
        h = (rule.edges[p + 1] - rule.edges[p]) / 2
        left = slice(0, p * order)
        pan = slice(p * order, (p + 1) * order)
        right = slice((p + 1) * order, q)
        above = R[i] * np.exp(E[i] - E) / (lam * y)
        K[i, left] = w[left] * below[left]
        part = h * S[il]
        K[i, pan] = part * below[pan] + (w[pan] - part) * above[pan]
        K[i, right] = w[right] * above[right]
    kern = kernel_positive_values(params, y[:, None], y[None, :])
    return KernelGrid("positive", params, rule, kern, K, np.ones_like(y))


def hamiltonian_on_axis(params: GribovParams, monomial) -> Callable[[np.ndarray], np.ndarray]:
    """``s -> (H p)(-i s)`` for ``p(z) = sum monomial[k] z**k``.

    Uses ``H z**k = mu k z**k + i lam (k (k-1) z**(k-1) + k z**(k+1))``.
    """
    a = np.asarray(monomial, dtype=complex)
    out = np.zeros(a.size + 1, dtype=complex)
    for k, ak in enumerate(a):
        if ak == 0:
            continue
        out[k] += params.mu * k * ak
        if k >= 1:
            out[k - 1] += 1j * params.lam * k * (k - 1) * ak
        out[k + 1] += 1j * params.lam * k * ak

    def psi(s):
        z = -1j * np.asarray(s, dtype=float)
        return np.polynomial.polynomial.polyval(z, out)

    return psi


def polynomial_on_axis(monomial) -> Callable[[np.ndarray], np.ndarray]:
    a = np.asarray(monomial, dtype=complex)
    return lambda y: np.polynomial.polynomial.polyval(-1j * np.asarray(y, dtype=float), a)


@dataclass(frozen=True, eq=False)
class InverseResult:
    y: np.ndarray
    u: np.ndarray
    tail_bound: float
    cutoff: np.ndarray


def apply_inverse(
    params: GribovParams, psi, y, order: int = 32, panel_width: float = 0.5, tol_tail: float = 1e-10,
) -> InverseResult:
    """``u(y) = int_0^inf N(y, s) psi(s) ds`` with ``psi(s)`` standing for ``(H phi)(-i s)``.

    ``psi`` is a vectorized callable.  For each ``y`` the integral splits at
    ``s = y`` and both smooth pieces use composite Gauss-Legendre.  The upper
    cut-off ``S`` satisfies ``E(S) - E(y) >= 45``; the neglected tail is
    bounded by ``|N(y, S) psi(S)| / E'(S)`` and reported.
    """
    params.require_positive("apply_inverse")
    if not callable(psi):
        raise TypeError("psi must be a callable of s; use KernelGrid.operator for sampled data")
    y = np.atleast_1d(np.asarray(y, dtype=float))
    if np.any(y < 0):
        raise ParameterError("apply_inverse needs y >= 0")
    lam, rho = params.lam, params.rho
    xg, wg = gauss_legendre(order)
    u = np.zeros(y.size, dtype=complex)
    cut = np.zeros(y.size)
    tail = 0.0
    for i, yi in enumerate(y):
        if yi == 0.0:
            continue
        ey = _exponent(params, yi)
        # E(S) = ey + ENVELOPE_LOG + log growth of psi (polynomial, modest)
        target = ey + ENVELOPE_LOG + 10.0
        S = -rho + math.sqrt(rho * rho + 2 * target)
        cut[i] = S
        n_lo = max(1, int(math.ceil(yi / panel_width)))
        n_hi = max(1, int(math.ceil((S - yi) / panel_width)))
        lo = np.linspace(0.0, yi, n_lo + 1)
        hi = np.linspace(yi, S, n_hi + 1)
        s_lo = (lo[:-1, None] + (lo[1:] - lo[:-1])[:, None] * (xg + 1) / 2).ravel()
        w_lo = ((lo[1:] - lo[:-1])[:, None] * wg / 2).ravel()
        s_hi = (hi[:-1, None] + (hi[1:] - hi[:-1])[:, None] * (xg + 1) / 2).ravel()
        w_hi = ((hi[1:] - hi[:-1])[:, None] * wg / 2).ravel()
        part_lo = np.sum(w_lo * r_function(params, s_lo) / (lam * s_lo) * psi(s_lo))
        ry = float(r_function(params, yi))
        part_hi = np.sum(w_hi * ry * np.exp(ey - _exponent(params, s_hi)) / (lam * s_hi) * psi(s_hi))
        u[i] = part_lo + part_hi
        edge = ry * math.exp(ey - _exponent(params, S)) / (lam * S) * abs(complex(np.asarray(psi(np.array([S])))[0]))
        tail = max(tail, edge / (S + rho))
    if tail > tol_tail:
        raise DomainTruncationError(f"truncated tail bound {tail:.3g} exceeds {tol_tail:.3g}")
    return InverseResult(y, u, tail, cut)


def boundary_indicator(params: GribovParams, result: InverseResult) -> np.ndarray:
    """``exp(-E(y)) u'(y)`` by centred differences on the result grid."""
    du = np.gradient(result.u, result.y)
    return np.exp(-_exponent(params, result.y)) * du


@dataclass(frozen=True, eq=False)
class NystromResult:
    kappas: np.ndarray
    sigmas: np.ndarray
    leading_vector: np.ndarray
    separation: float
    positive: bool
    grid: KernelGrid

    def report(self, k: int | None = None) -> SpectralReport:
        sig = self.sigmas if k is None else self.sigmas[:k]
        return SpectralReport(
            method="kernel", params=self.grid.params,
            trunc={"Y": float(self.grid.rule.edges[-1]), "panels": self.grid.rule.n_panels,
                   "order": self.grid.rule.order},
            eigenvalues=tuple(EigenvalueEntry(complex(s), float("nan"), True) for s in sig),
        )


def nystrom_spectrum(params: GribovParams, grid: KernelGrid | None = None, k: int = 3, strict: bool = True) -> NystromResult:
    """Leading eigenvalues ``kappa`` of the discretized positive-axis inverse, ``sigma = 1/kappa``.

    Checks the Perron structure: the leading ``kappa`` real, positive and
    strictly larger in modulus than the rest, with an entrywise positive
    eigenvector.
    """
    params.require_positive("the Nystrom spectrum")
    grid = grid or positive_grid(params)
    vals, vecs = sla.eig(grid.operator)
    order = np.argsort(-np.abs(vals))
    vals, vecs = vals[order], vecs[:, order]
    lead = vals[0]
    v = vecs[:, 0]
    v = v / v[np.argmax(np.abs(v))]
    positive = bool(np.all(v.real > 0) and np.max(np.abs(v.imag)) < 1e-10 and abs(lead.imag) < 1e-12 * abs(lead) and lead.real > 0)
    separation = float(abs(vals[1]) / abs(lead)) if vals.size > 1 else 0.0
    if strict and (not positive or separation >= 1.0):
        raise PerronViolationError(
            f"leading kappa={lead:.6g}, |kappa_2/kappa_1|={separation:.3g}, "
            f"min eigenvector entry {v.real.min():.3g}"
        )
    kap = vals[:k]
    return NystromResult(kap, 1.0 / kap, v.real, separation, positive, grid)


# negative axis

def _require_rho(params: GribovParams) -> float:
    params.require_nonzero_lambda("the negative-axis kernel")
    if params.rho <= 0:
        raise UnsupportedParameterError(
            f"negative-axis kernel needs rho > 0 (got {params.rho}); the rho < 0 representation is not provided"
        )
    return params.rho


def jhat(rho: float, m) -> np.ndarray:
    """``exp((m - rho)**2 / 2) int_{-inf}^m exp(-(u - rho)**2/2) / u du`` for ``m < 0``.

    Equals ``int_0^inf exp((m - rho) t - t**2/2) / (m - t) dt``, integrated on
    geometric panels ``[0, |m|], [|m|, 2|m|], ...`` up to the point where the
    integrand envelope has dropped by ``exp(-45)``.
    """
    m = np.atleast_1d(np.asarray(m, dtype=float))
    if np.any(m >= 0):
        raise ParameterError("jhat needs m < 0")
    xg, wg = gauss_legendre(24)
    c = rho - m
    tmax = -c + np.sqrt(c * c + 2 * ENVELOPE_LOG)
    am = np.abs(m)
    n_pan = np.ceil(np.log2(np.maximum(tmax / am, 1.0))).astype(int) + 1
    k = np.arange(int(n_pan.max()))
    lo = np.where(k == 0, 0.0, am[:, None] * 2.0 ** (k - 1))
    hi = am[:, None] * 2.0**k
    hi = np.minimum(hi, tmax[:, None])
    lo = np.minimum(lo, tmax[:, None])
    out = np.zeros(m.size)
    for start in range(0, m.size, 256):
        sl = slice(start, start + 256)
        t = lo[sl, :, None] + (hi[sl] - lo[sl])[..., None] * (xg + 1) / 2
        wt = (hi[sl] - lo[sl])[..., None] * wg / 2
        f = np.exp(-c[sl, None, None] * t - t * t / 2) / (m[sl, None, None] - t)
        out[sl] = (f * wt).sum(axis=(1, 2))
    return out


def jhat_quad(rho: float, m: float) -> float:
    c = rho - m
    return quad(lambda t: math.exp(-c * t - t * t / 2) / (m - t), 0.0, np.inf, epsrel=1e-13, epsabs=0.0, limit=200)[0]


def inner_integral(rho: float, m: float) -> float:
    """``J(m) = int_{-inf}^m exp(-(u - rho)**2/2) / u du`` (scalar, adaptive quadrature)."""
    if m >= 0:
        raise ParameterError("J(m) needs m < 0")
    return math.exp(-((m - rho) ** 2) / 2) * jhat_quad(rho, m)


def _theta_ratio(y):
    # theta(y)/y, equal to 1 on [-1, 0) with the removable point y = 0
    y = np.asarray(y, dtype=float)
    return np.where(y >= -1.0, 1.0, -1.0 / np.where(y < -1.0, y, -1.0))


def kernel_negative_axis(params: GribovParams, y: float, s: float) -> float:
    """``Nn(y, s)`` with the inner integral by adaptive quadrature."""
    rho = _require_rho(params)
    if y > 0 or s > 0:
        raise ParameterError(f"negative-axis kernel needs y, s <= 0, got y={y}, s={s}")
    m = min(y, s)
    if m == 0.0:
        return -math.inf
    expo = -rho * y + s * s / 2 - (m - rho) ** 2 / 2
    return float(_theta_ratio(y) / _theta_ratio(s) * math.exp(expo) * jhat_quad(rho, m))


def kernel_negative_values(params: GribovParams, y, s, jhat_at=None) -> np.ndarray:
    """Vectorized ``Nn`` on arrays; ``jhat_at`` may supply ``Jhat(min(y, s))``."""
    rho = _require_rho(params)
    y, s = np.broadcast_arrays(np.asarray(y, float), np.asarray(s, float))
    m = np.minimum(y, s)
    if jhat_at is None:
        uniq, inv = np.unique(m, return_inverse=True)
        jhat_at = jhat(rho, uniq)[inv].reshape(m.shape)
    expo = -rho * y + s * s / 2 - (m - rho) ** 2 / 2
    return _theta_ratio(y) / _theta_ratio(s) * np.exp(expo) * jhat_at


def dominating_kernel(params: GribovParams, y, s) -> np.ndarray:
    """``exp(-rho**2/2) |(theta(y)/y) (s/theta(s)) / (m (m - rho))|`` with ``m = min(y, s)``."""
    rho = _require_rho(params)
    y, s = np.broadcast_arrays(np.asarray(y, float), np.asarray(s, float))
    m = np.minimum(y, s)
    return math.exp(-rho * rho / 2) * np.abs(_theta_ratio(y) / _theta_ratio(s) / (m * (m - rho)))


def negative_edges(Y: float, per_unit: int = 1, grading: int = 20) -> np.ndarray:
    """Panels graded like ``-2**-j`` toward 0 on ``[-1, 0]`` and uniform on ``[-Y, -1]``."""
    if Y <= 1:
        raise ParameterError("negative grid needs Y > 1")
    graded = [-(2.0 ** -j) for j in range(grading + 1)]
    uniform = list(np.linspace(-Y, -1.0, int(math.ceil((Y - 1) * per_unit)) + 1))
    return np.array(sorted(set(uniform + graded)) + [0.0])


def negative_grid(params: GribovParams, Y: float = 20.0, per_unit: int = 1, order: int = 16) -> KernelGrid:
    """Plain Nystrom discretization of ``Nn`` with ``|theta(s)| ds`` as measure."""
    rho = _require_rho(params)
    rule = panel_rule(negative_edges(Y, per_unit), order)
    y = rule.nodes
    jn = jhat(rho, y)
    idx = np.where(y[:, None] <= y[None, :], np.arange(y.size)[:, None], np.arange(y.size)[None, :])
    kern = kernel_negative_values(params, y[:, None], y[None, :], jhat_at=jn[idx])
    measure = theta.abs(y)
    op = kern * (rule.weights * measure)[None, :]
    return KernelGrid("negative", params, rule, kern, op, measure)


@dataclass(frozen=True)
class SignCheck:
    min_minus_kernel: float
    max_ratio: float
    nonnegative: bool
    dominated: bool


def negative_kernel_checks(grid: KernelGrid, rtol: float = 1e-12) -> SignCheck:
    """``-Nn >= 0`` and ``|Nn| <= Ntilde`` at every node pair."""
    y = grid.nodes
    dom = dominating_kernel(grid.params, y[:, None], y[None, :])
    ratio = np.abs(grid.kernel) / dom
    return SignCheck(
        min_minus_kernel=float((-grid.kernel).min()),
        max_ratio=float(ratio.max()),
        nonnegative=bool(np.all(-grid.kernel >= 0)),
        dominated=bool(np.all(ratio <= 1 + rtol)),
    )


def _hs_integral(kernel_fn, rule: PanelRule, params: GribovParams) -> float:
    """``int int |k(y, s)|**2 |theta(y)| |theta(s)| dy ds`` over the rule's square.

    Off-diagonal panel pairs use the tensor rule.  Each diagonal square is
    split along ``s = y`` and both triangles use a collapsed (Duffy) map, which
    copes with the kink and the logarithmic singularity at the corner.
    """
    n = rule.order
    x, w = gauss_legendre(n)
    nodes, wts = rule.nodes, rule.weights
    a, b = rule.edges[:-1], rule.edges[1:]
    tw = theta.abs(nodes) * wts
    total = 0.0
    P = rule.n_panels
    for p in range(P):
        rows = slice(p * n, (p + 1) * n)
        k = kernel_fn(nodes[rows, None], nodes[None, :])
        f = (k * k) * tw[rows, None] * tw[None, :]
        f[:, rows] = 0.0
        total += float(f.sum())
    u = (x + 1) / 2
    U, V = np.meshgrid(u, u, indexing="ij")
    W2 = np.outer(w / 2, w / 2)
    for p in range(P):
        h = b[p] - a[p]
        yy = a[p] + h * U
        ss = a[p] + h * U * V
        jac = h * h * U
        for Y_, S_ in ((yy, ss), (ss, yy)):
            k = kernel_fn(Y_, S_)
            total += float((k * k * theta.abs(Y_) * theta.abs(S_) * jac * W2).sum())
    return total


@dataclass(frozen=True, eq=False)
class HSResult:
    levels: tuple[tuple[float, int], ...]
    values: np.ndarray
    dominating: np.ndarray
    rel_changes: np.ndarray
    saturated: bool


def hs_norm_estimate(
    params: GribovParams, levels=((20.0, 1), (40.0, 1), (80.0, 1), (80.0, 2)), order: int = 16,
    tol: float = 1e-4, strict: bool = True,
) -> HSResult:
    """Squared Hilbert-Schmidt norm of ``Nn`` on ``[-Y, 0]**2`` over refinement levels.

    ``levels`` is a sequence of ``(Y, panels per unit length)``.  Values come
    with the same integral for the dominating kernel.  The estimate counts as
    saturated when the last relative change is at most ``tol``.  Changes that
    fail to shrink along domain doublings signal divergence.
    """
    _require_rho(params)
    vals, doms = [], []
    for Y, per in levels:
        rule = panel_rule(negative_edges(Y, per), order)
        vals.append(_hs_integral(lambda y, s: kernel_negative_values(params, y, s), rule, params))
        doms.append(_hs_integral(lambda y, s: dominating_kernel(params, y, s), rule, params))
    vals = np.array(vals)
    rel = np.abs(np.diff(vals)) / vals[1:]
    saturated = bool(rel.size and rel[-1] <= tol)
    if strict and rel.size >= 2 and not saturated and rel[-1] >= rel[-2]:
        raise DivergenceError(f"HS estimates keep growing: {vals}")
    return HSResult(tuple((float(Y), int(p)) for Y, p in levels), vals, np.array(doms), rel, saturated)


@dataclass(frozen=True, eq=False)
class NegativePerron:
    kappa: float
    vector: np.ndarray
    separation: float
    positive: bool
    sigma_from_eigenrelation: float


def negative_axis_perron(grid: KernelGrid) -> NegativePerron:
    """Perron data of ``-Nn`` on ``L2(|theta| ds)``.

    Also returns ``1 / (kappa exp(rho**2/2))``, the value the eigenrelation
    ``psi = -sigma exp(rho**2/2) int Nn psi`` would assign; it is reported, not
    asserted to match the spectrum.
    """
    mat = -grid.operator
    vals, vecs = sla.eig(mat)
    order = np.argsort(-np.abs(vals))
    vals, vecs = vals[order], vecs[:, order]
    lead = vals[0]
    # the matrix is entrywise non-negative, so power steps from |v| keep every
    # entry >= 0 exactly and remove the round-off signs in the far tail
    v = np.abs(vecs[:, 0].real)
    for _ in range(500):
        nxt = mat @ v
        nxt /= nxt.max()
        done = np.max(np.abs(nxt - v)) < 1e-15
        v = nxt
        if done:
            break
    positive = bool(np.all(v > 0) and lead.real > 0 and abs(lead.imag) < 1e-12 * abs(lead))
    rho = grid.params.rho
    return NegativePerron(
        kappa=float(lead.real),
        vector=v,
        separation=float(abs(vals[1]) / abs(lead)),
        positive=positive,
        sigma_from_eigenrelation=float(1.0 / (lead.real * math.exp(rho * rho / 2))),
    )
