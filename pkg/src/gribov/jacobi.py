"""Spectrum of the truncated matrix and the checks built on it.

The matrix of ``H`` has real diagonal and purely imaginary, equal
off-diagonals.  With the unitary ``D = diag(i**n)`` the product ``D M D^{-1}``
is real (``mu N`` plus ``lam`` times an antisymmetric band), so eigenvalues
are computed in real arithmetic and eigenvectors mapped back with ``D^{-1}``.
The same map fixes the eigenvector phase: ``D c`` is real.

The real form is far from normal, so QR eigenvalues carry round-off of
order ``eps ||M||`` times a condition number that grows with the index.  Real
eigenvalues are therefore polished by Newton steps on the continued fraction
of the tridiagonal recurrence, run upward from the last row.  That recursion
follows the decaying eigenvector and keeps relative accuracy entrywise.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla

from .bargmann import BandedOperator, CoeffVector, GribovParams, build_hamiltonian, parity_vector
from .errors import (
    ConvergenceError,
    DegenerateSignError,
    InvalidTruncationError,
    LowerBoundViolation,
    ParameterError,
)
from .report import EigenvalueEntry, SpectralReport

TOL_CONVERGED = 1e-8
TOL_ORTHO = 1e-8
TOL_REAL = 1e-8


@dataclass(frozen=True, eq=False)
class EigenPair:
    """``sigma`` with its unit eigenvector (``c_0 = 0``).

    ``residual`` is ``||Hv - sigma v||`` over rows ``1..N-2``.  ``leak`` is the
    size of the component ``H`` would push to index ``N``, a direct measure of
    truncation damage.
    """

    sigma: complex
    vector: CoeffVector
    residual: float
    leak: float
    converged: bool

    def entry(self) -> EigenvalueEntry:
        return EigenvalueEntry(complex(self.sigma), self.residual, self.converged)


def _phases(n: np.ndarray) -> np.ndarray:
    # exact powers of i
    return np.array([1, 1j, -1, -1j])[n % 4]


def _real_form(op: BandedOperator) -> np.ndarray | None:
    """Real matrix ``D M D^{-1}`` on B0, or None if ``M`` lacks the structure."""
    diag, lo, up = op.diag, op.lower, op.upper
    if np.any(np.imag(diag) != 0) or np.any(np.real(lo) != 0) or np.any(lo != up):
        return None
    n = op.trunc - 1
    r = np.diag(np.real(diag[1:]).astype(float))
    off = np.imag(lo[1:]).astype(float)
    idx = np.arange(n - 1)
    r[idx, idx + 1] = off
    r[idx + 1, idx] = -off
    return r


def _eig(op: BandedOperator, vectors: bool):
    real = _real_form(op)
    try:
        if real is not None:
            if vectors:
                w, x = sla.eig(real)
                return w, _phases(np.arange(1, op.trunc))[:, None].conj() * x
            return sla.eigvals(real), None
        mat = op.b0_block()
        if vectors:
            return sla.eig(mat)
        return sla.eigvals(mat), None
    except sla.LinAlgError as exc:
        raise ConvergenceError(
            f"eigensolver failed at N={op.trunc}: {exc}; try a smaller truncation or rescale mu, lambda"
        ) from exc


def _mismatch(diag: np.ndarray, off: np.ndarray, s: np.ndarray, m: np.ndarray):
    """Residual of row ``m`` of the real form and its ``s``-derivative.

    Row ``j`` reads ``a_j x_{j-1} + (d_j - s) x_j + c_j x_{j+1} = 0`` with
    ``c_j = off[j]`` and ``a_j = -off[j-1]``.  Ratios ``x_j / x_{j-1}`` are
    run down from the top row to ``m`` and up from the last row to ``m + 1``;
    both directions follow the growing side of the eigenvector when ``m`` is
    its peak, which keeps the recursion stable.
    """
    n = diag.size
    zero = np.zeros_like(s)
    # top part: a_m / p_m with p_j = x_j / x_{j-1}
    top, dtop = zero.copy(), zero.copy()
    p = (s - diag[0]) / off[0] if n > 1 else zero
    dp = np.full_like(s, 1.0 / off[0]) if n > 1 else zero
    for j in range(1, int(m.max()) + 1):
        a = -off[j - 1]
        hit = m == j
        top = np.where(hit, a / p, top)
        dtop = np.where(hit, -a * dp / p**2, dtop)
        if j < n - 1:
            p_new = -(a / p + diag[j] - s) / off[j]
            dp = -(-a * dp / p**2 - 1.0) / off[j]
            p = p_new
    # bottom part: c_m q_{m+1} with q_j = x_j / x_{j-1}
    bot, dbot = zero.copy(), zero.copy()
    q, dq = zero.copy(), zero.copy()
    for j in range(n - 1, int(m.min()), -1):
        c = off[j] if j < n - 1 else 0.0
        a = -off[j - 1]
        den = diag[j] - s + c * q
        dden = -1.0 + c * dq
        q = -a / den
        dq = a * dden / den**2
        hit = m == j - 1
        bot = np.where(hit, off[j - 1] * q, bot)
        dbot = np.where(hit, off[j - 1] * dq, dbot)
    dm = diag[m]
    return top + dm - s + bot, dtop - 1.0 + dbot


def _refine_vectors(op: BandedOperator, w: np.ndarray, x: np.ndarray, steps: int = 2) -> np.ndarray:
    """Inverse iteration at the (polished) real eigenvalues, starting from ``x``."""
    real_form = _real_form(op)
    if real_form is None:
        return x
    ph = _phases(np.arange(1, op.trunc))[:, None]
    y = (ph * x).real.copy()
    n = real_form.shape[0]
    ab = np.zeros((3, n))
    ab[0, 1:] = np.diag(real_form, 1)
    ab[2, :-1] = np.diag(real_form, -1)
    out = x.copy()
    for j, s in enumerate(w):
        if s.imag != 0:
            continue
        ab[1] = np.diag(real_form) - s.real * (1 + 1e-15)
        v = y[:, j]
        with np.errstate(all="ignore"):
            try:
                for _ in range(steps):
                    v = sla.solve_banded((1, 1), ab, v)
                    v = v / np.linalg.norm(v)
            except (sla.LinAlgError, ValueError):
                continue
        if np.all(np.isfinite(v)):
            out[:, j] = ph[:, 0].conj() * v
    return out


def _peaks(real: np.ndarray, w: np.ndarray) -> np.ndarray:
    """Peak index of each eigenvector by one step of inverse iteration."""
    n = real.shape[0]
    ab = np.zeros((3, n))
    ab[0, 1:] = np.diag(real, 1)
    ab[2, :-1] = np.diag(real, -1)
    out = np.empty(w.size, dtype=int)
    rhs = np.ones(n)
    for i, s in enumerate(w):
        ab[1] = np.diag(real) - s * (1 + 1e-13)
        with np.errstate(all="ignore"):
            try:
                y = sla.solve_banded((1, 1), ab, rhs)
                y = sla.solve_banded((1, 1), ab, y / np.abs(y).max())
            except (sla.LinAlgError, ValueError):
                y = np.full(n, np.nan)
        out[i] = int(np.nanargmax(np.abs(y))) if np.isfinite(y).any() else 0
    return out


def _polish(op: BandedOperator, w: np.ndarray, max_iter: int = 12, window: float = 1e-3) -> np.ndarray:
    """Newton refinement of the real eigenvalues in ``w``; others pass through.

    Each value keeps the iterate with the smallest mismatch; it replaces the
    QR value when that mismatch beats the QR one and stays within ``window``
    (relative).
    """
    real_form = _real_form(op)
    if op.trunc < 3 or real_form is None:
        return w
    diag = np.diag(real_form).copy()
    off = np.diag(real_form, 1).copy()
    real = np.abs(w.imag) <= 1e-8 * (1 + np.abs(w))
    if not real.any():
        return w
    x0 = w.real[real].copy()
    m = _peaks(real_form, x0)
    x = x0.copy()
    with np.errstate(all="ignore"):
        f, df = _mismatch(diag, off, x, m)
        f0 = np.abs(f)
        best, best_f = x.copy(), f0.copy()
        for _ in range(max_iter):
            x = x - f / df
            x = np.where(np.isfinite(x), x, best)
            f, df = _mismatch(diag, off, x, m)
            better = np.isfinite(f) & (np.abs(f) < best_f) & (np.abs(x - x0) <= window * np.abs(x0))
            best = np.where(better, x, best)
            best_f = np.where(better, np.abs(f), best_f)
    out = w.copy()
    idx = np.nonzero(real)[0]
    ok = best_f < f0
    out[idx[ok]] = best[ok]
    return out


def _order(w: np.ndarray) -> np.ndarray:
    return np.lexsort((w.imag, np.round(w.real, 12)))


def eigenvalues(params: GribovParams, trunc: int, k: int | None = None, polish: bool = True) -> np.ndarray:
    """Eigenvalues on B0 sorted by real part (all of them if ``k`` is None)."""
    op = build_hamiltonian(params, trunc)
    w, _ = _eig(op, vectors=False)
    w = w[_order(w)]
    if k is not None:
        w = w[:k]
    if polish and params.lam != 0:
        w = _polish(op, w)
    return w


def _normalize(c: np.ndarray) -> np.ndarray:
    c = c / np.linalg.norm(c)
    d = _phases(np.arange(c.size)) * c
    big = np.abs(d) > 1e-8 * np.abs(d).max()
    j = int(np.argmax(big))
    phase = d[j] / abs(d[j])
    return c / phase


def _match_converged(w: np.ndarray, ref: np.ndarray, tol: float) -> np.ndarray:
    out = np.zeros(w.size, dtype=bool)
    for i, s in enumerate(w):
        j = np.argmin(np.abs(ref - s))
        out[i] = abs(ref[j] - s) <= tol * max(abs(s), 1e-300)
    return out


def eigen_spectrum(
    op: BandedOperator,
    k: int,
    reference_trunc: int | None = None,
    tol_converged: float = TOL_CONVERGED,
) -> list[EigenPair]:
    """``k`` eigenpairs of smallest real part on the B0 block.

    An eigenvalue is flagged converged when a second truncation
    (``reference_trunc``, default ``2N``) reproduces it to ``tol_converged``.
    Operators built without parameters skip the check and report every pair
    as converged.
    """
    n = op.trunc
    if not 1 <= k <= n - 1:
        raise InvalidTruncationError(f"k must lie in 1..{n - 1}, got {k}")
    w, x = _eig(op, vectors=True)
    order = _order(w)[:k]
    w, x = w[order], x[:, order]
    w = _polish(op, w)
    x = _refine_vectors(op, w, x)
    if op.params is not None:
        if op.params.lam == 0:
            conv = np.ones(k, dtype=bool)
        else:
            ref_n = reference_trunc or 2 * n
            ref_op = build_hamiltonian(op.params, ref_n)
            raw = eigenvalues(op.params, ref_n, polish=False)
            near = np.array([np.argmin(np.abs(raw - s)) for s in w])
            conv = _match_converged(w, _polish(ref_op, raw[near]), tol_converged)
    else:
        conv = np.ones(k, dtype=bool)
    mat = op.to_dense()
    # H e_{N-1} would put lam (N-1) sqrt(N) on e_N; recover |lam| from the last band entry
    lam_abs = abs(op.lower[-1]) / ((n - 2) * math.sqrt(n - 1)) if n > 2 else 0.0
    edge = lam_abs * (n - 1) * math.sqrt(n)
    pairs = []
    for j in range(k):
        c = np.concatenate([[0.0], x[:, j]])
        c = _normalize(c)
        r = mat @ c - w[j] * c
        pairs.append(EigenPair(
            sigma=complex(w[j]),
            vector=CoeffVector(c),
            residual=float(np.linalg.norm(r[1:n - 1])),
            leak=float(edge * abs(c[-1])),
            converged=bool(conv[j]),
        ))
    return pairs


def convergence_study(
    params: GribovParams, n_list, k: int, tol_converged: float = TOL_CONVERGED
) -> SpectralReport:
    """Lowest ``k`` eigenvalues for each truncation in ``n_list``.

    The final row decides the convergence flags: an eigenvalue counts as
    converged when it matches the previous truncation to ``tol_converged``.
    """
    n_list = [int(n) for n in n_list]
    if n_list != sorted(n_list) or len(set(n_list)) != len(n_list):
        raise InvalidTruncationError("truncation list must be strictly ascending")
    t0 = time.perf_counter()
    rows = []
    for n in n_list:
        rows.append((n, tuple(complex(s) for s in eigenvalues(params, n, k))))
    last = np.array(rows[-1][1])
    if len(rows) > 1:
        prev = np.array(rows[-2][1])
        m = min(last.size, prev.size)
        conv = np.zeros(last.size, dtype=bool)
        conv[:m] = np.abs(last[:m] - prev[:m]) <= tol_converged * np.abs(last[:m])
    else:
        conv = np.full(last.size, params.lam == 0)
    if params.lam == 0:
        conv[:] = True
    entries = tuple(EigenvalueEntry(complex(s), float("nan"), bool(c)) for s, c in zip(last, conv))
    notes = ()
    if not conv.all():
        notes = (f"{int((~conv).sum())} of {conv.size} eigenvalues not converged at N={n_list[-1]}",)
    return SpectralReport(
        method="jacobi", params=params, trunc={"N": n_list[-1], "N_list": n_list},
        eigenvalues=entries, convergence=tuple(rows), wall_time=time.perf_counter() - t0, notes=notes,
    )


def converged_digits(report: SpectralReport) -> np.ndarray:
    """Digits of agreement between consecutive rows, shape ``(rows-1, k)``."""
    rows = [np.array(s) for _, s in report.convergence]
    k = min(r.size for r in rows)
    out = []
    for a, b in zip(rows[:-1], rows[1:]):
        rel = np.abs(a[:k] - b[:k]) / np.abs(b[:k])
        out.append(np.where(rel > 0, -np.log10(np.maximum(rel, 1e-300)), 16.0).clip(0, 16))
    return np.array(out)


def _matrix(pairs: list[EigenPair]) -> np.ndarray:
    return np.column_stack([p.vector.coeffs for p in pairs])


def biorthogonality_matrix(pairs: list[EigenPair]) -> np.ndarray:
    """Parity-twisted Gram matrix ``G_mn = <phi_m, P phi_n> = sum_k (-1)**k c_mk conj(c_nk)``.

    Accumulated row by row so that the result is exactly Hermitian; with the
    phase convention of ``eigen_spectrum`` it is also real.
    """
    x = _matrix(pairs)
    p = parity_vector(x.shape[0])
    g = np.zeros((x.shape[1], x.shape[1]), dtype=complex)
    for k in range(x.shape[0]):
        row = x[k]
        g += p[k] * np.outer(row, row.conj())
    return g


def bilinear_parity_matrix(pairs: list[EigenPair]) -> np.ndarray:
    """``sum_k (-1)**k c_mk c_nk`` without conjugation, kept for comparison."""
    x = _matrix(pairs)
    p = parity_vector(x.shape[0])
    return x.T @ (p[:, None] * x)


def max_offdiagonal(g: np.ndarray, sigmas, gap_tol: float | None = None) -> float:
    """Largest ``|G_mn|`` over pairs whose eigenvalues differ by more than ``gap_tol``.

    Default ``gap_tol`` is ``1e-6 (sigma_max - sigma_min)``.
    """
    s = np.asarray(sigmas)
    if gap_tol is None:
        gap_tol = 1e-6 * float(np.ptp(s.real)) if s.size > 1 else 0.0
    sep = np.abs(s[:, None] - s[None, :]) > gap_tol
    return float(np.abs(g)[sep].max()) if sep.any() else 0.0


def nu_signs(pairs: list[EigenPair], tol: float = 1e-13) -> np.ndarray:
    """``sign <phi_n, P phi_n>`` for each unit eigenvector."""
    p = parity_vector(pairs[0].vector.trunc)
    out = []
    for j, pair in enumerate(pairs):
        val = float(np.sum(p * np.abs(pair.vector.coeffs) ** 2))
        if abs(val) <= tol:
            raise DegenerateSignError(
                f"<phi, P phi> = {val:.3g} for eigenvalue #{j + 1} (sigma={pair.sigma:.6g}) is below {tol}"
            )
        out.append(1 if val > 0 else -1)
    return np.array(out)


def indefinite_gram(pairs: list[EigenPair], nu: np.ndarray | None = None) -> np.ndarray:
    """Matrix of ``<<phi_m, phi_n>> = <phi_m, nu P phi_n>`` with ``nu`` diagonal on the eigenbasis."""
    nu = nu_signs(pairs) if nu is None else nu
    return biorthogonality_matrix(pairs) * nu[None, :]


def indefinite_product(pairs: list[EigenPair], v: CoeffVector, w: CoeffVector) -> complex:
    """``<<v, w>>`` for ``v, w`` expanded (least squares) on the eigenvectors."""
    x = _matrix(pairs)
    a = np.linalg.lstsq(x, v.coeffs, rcond=None)[0]
    b = np.linalg.lstsq(x, w.coeffs, rcond=None)[0]
    return complex(a @ indefinite_gram(pairs) @ b.conj())


@dataclass(frozen=True, eq=False)
class CompletenessResult:
    mode: str
    residuals: np.ndarray
    skipped: tuple[int, ...]

    @property
    def terminal(self) -> float:
        return float(self.residuals[-1])

    def first_below(self, tol: float) -> int | None:
        hit = np.nonzero(self.residuals <= tol)[0]
        return int(hit[0]) + 1 if hit.size else None


def completeness_residual(
    pairs: list[EigenPair], target: CoeffVector, mode: str = "projection", tol_gram: float = 1e-14
) -> CompletenessResult:
    """Residuals ``r_k`` of expanding ``target`` on the first ``k`` eigenvectors.

    ``projection``: orthogonal projection onto their span (non-increasing in k).
    ``biorthogonal``: coefficients ``<target, P phi_j> / <phi_j, P phi_j>``;
    modes with ``|G_jj| < tol_gram`` are skipped and recorded.
    """
    if not target.in_b0(1e-15):
        raise ParameterError("completeness target must have c_0 = 0")
    x = _matrix(pairs)
    t = target.coeffs
    if mode == "projection":
        q, _ = np.linalg.qr(x)
        coef = q.conj().T @ t
        res = np.empty(x.shape[1])
        acc = np.zeros_like(t)
        for j in range(x.shape[1]):
            acc = acc + q[:, j] * coef[j]
            res[j] = np.linalg.norm(t - acc)
        # exact projections are nested; clip round-off wiggles at the 1e-16 level
        res = np.minimum.accumulate(res)
        return CompletenessResult(mode, res, ())
    if mode == "biorthogonal":
        p = parity_vector(t.size)
        g = biorthogonality_matrix(pairs)
        skipped = []
        acc = np.zeros_like(t)
        res = np.empty(x.shape[1])
        for j in range(x.shape[1]):
            gjj = g[j, j]
            if abs(gjj) < tol_gram:
                skipped.append(j + 1)
            else:
                acc = acc + (np.sum(p * t * x[:, j].conj()) / gjj) * x[:, j]
            res[j] = np.linalg.norm(t - acc)
        return CompletenessResult(mode, res, tuple(skipped))
    raise ValueError(f"unknown completeness mode {mode!r}")


@dataclass(frozen=True)
class BoundCheck:
    min_re: float
    bound: float
    margin: float
    count: int
    passed: bool


def lower_bound_check(pairs: list[EigenPair], params: GribovParams, tol: float = 1e-8, strict: bool = True) -> BoundCheck:
    """``min Re sigma >= |mu| - tol`` over converged pairs."""
    if params.mu == 0:
        raise ParameterError("lower bound check needs mu != 0")
    vals = [p.sigma.real for p in pairs if p.converged]
    if not vals:
        raise ConvergenceError("no converged eigenvalues to check; increase the truncation")
    m = min(vals)
    bound = abs(params.mu)
    chk = BoundCheck(m, bound, m - bound, len(vals), m >= bound - tol)
    if strict and not chk.passed:
        dump = ", ".join(f"{p.sigma:.12g}" for p in pairs)
        raise LowerBoundViolation(
            f"min Re sigma = {m!r} < |mu| - tol = {bound - tol!r} at mu={params.mu}, "
            f"lambda={params.lam}; eigenvalues: {dump}"
        )
    return chk


def reality_check(pairs: list[EigenPair], tol_real: float = TOL_REAL) -> tuple[float, bool]:
    """Largest ``|Im sigma| / (1 + |sigma|)`` over converged pairs and its verdict."""
    vals = [abs(p.sigma.imag) / (1 + abs(p.sigma)) for p in pairs if p.converged]
    worst = max(vals) if vals else 0.0
    return worst, worst <= tol_real


def spectral_report(pairs: list[EigenPair], params: GribovParams, trunc: int, wall_time: float = float("nan")) -> SpectralReport:
    return SpectralReport(
        method="jacobi", params=params, trunc={"N": int(trunc)},
        eigenvalues=tuple(p.entry() for p in pairs), wall_time=wall_time,
    )


def coefficient_magnitudes_csv(pairs: list[EigenPair]) -> str:
    x = np.abs(_matrix(pairs))
    lines = ["n," + ",".join(f"phi{j + 1}" for j in range(x.shape[1]))]
    for n, row in enumerate(x):
        lines.append(f"{n}," + ",".join(repr(float(v)) for v in row))
    return "\n".join(lines) + "\n"
