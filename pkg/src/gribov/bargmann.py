"""Truncated Bargmann space and the Gribov Hamiltonian as a finite matrix.

Elements are stored by their coordinates ``c_n`` in the orthonormal basis
``e_n(z) = z**n / sqrt(n!)``.  The monomial coefficients are ``a_n = c_n / sqrt(n!)``
and never appear in norms, which keeps everything Euclidean and free of
factorial overflow.

At truncation order ``N`` all operators act on indices ``0..N-1``.  The last
index is the truncation edge: any identity that would need index ``N`` is only
exact on the leading ``(N-1)`` rows, and identity checks exclude one more row
for safety.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionMismatchError, InvalidTruncationError, ParameterError


@dataclass(frozen=True)
class GribovParams:
    """Couplings ``mu`` and ``lam`` of ``H = mu*N + i*lam*H_I``."""

    mu: float
    lam: float

    def __post_init__(self):
        if not (math.isfinite(self.mu) and math.isfinite(self.lam)):
            raise ParameterError(f"non-finite couplings mu={self.mu}, lambda={self.lam}")

    @property
    def rho(self) -> float | None:
        return self.mu / self.lam if self.lam != 0 else None

    def require_positive(self, what: str = "this operation") -> None:
        if not (self.mu > 0 and self.lam > 0):
            raise ParameterError(
                f"{what} needs mu > 0 and lambda > 0, got mu={self.mu}, lambda={self.lam}"
            )

    def require_nonzero_lambda(self, what: str = "this operation") -> None:
        if self.lam == 0:
            raise ParameterError(f"{what} is undefined for lambda = 0")

    def flipped(self) -> "GribovParams":
        return GribovParams(self.mu, -self.lam)


@dataclass(frozen=True, eq=False)
class CoeffVector:
    coeffs: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=complex)
        if c.ndim != 1 or c.size == 0:
            raise InvalidTruncationError("coefficient vector must be one-dimensional and non-empty")
        c = c.copy()
        c.flags.writeable = False
        object.__setattr__(self, "coeffs", c)

    @property
    def trunc(self) -> int:
        return self.coeffs.size

    @classmethod
    def basis(cls, n: int, trunc: int) -> "CoeffVector":
        if not 0 <= n < trunc:
            raise InvalidTruncationError(f"basis index {n} outside 0..{trunc - 1}")
        c = np.zeros(trunc, dtype=complex)
        c[n] = 1.0
        return cls(c)

    @classmethod
    def from_monomial(cls, a) -> "CoeffVector":
        """From monomial coefficients ``a_n`` of ``sum a_n z**n``."""
        a = np.asarray(a, dtype=complex)
        return cls(a * _sqrt_factorials(a.size))

    def to_monomial(self) -> np.ndarray:
        return self.coeffs / _sqrt_factorials(self.trunc)

    def in_b0(self, tol: float = 0.0) -> bool:
        return abs(self.coeffs[0]) <= tol

    def to_json(self) -> str:
        return json.dumps([[float(c.real), float(c.imag)] for c in self.coeffs])

    @classmethod
    def from_json(cls, text: str) -> "CoeffVector":
        pairs = json.loads(text)
        return cls(np.array([complex(re, im) for re, im in pairs]))

    def __add__(self, other: "CoeffVector") -> "CoeffVector":
        _check_same(self.trunc, other.trunc)
        return CoeffVector(self.coeffs + other.coeffs)

    def __sub__(self, other: "CoeffVector") -> "CoeffVector":
        _check_same(self.trunc, other.trunc)
        return CoeffVector(self.coeffs - other.coeffs)

    def __mul__(self, scalar: complex) -> "CoeffVector":
        return CoeffVector(scalar * self.coeffs)

    __rmul__ = __mul__


def _sqrt_factorials(n: int) -> np.ndarray:
    # sqrt(k!) built multiplicatively; overflows to inf only past k ~ 300,
    # which only the monomial conversions touch.
    out = np.ones(n)
    for k in range(1, n):
        out[k] = out[k - 1] * math.sqrt(k)
    return out


def _check_same(n: int, m: int) -> None:
    if n != m:
        raise DimensionMismatchError(f"truncation mismatch: {n} vs {m}")


@dataclass(frozen=True, eq=False)
class BandedOperator:
    """Tridiagonal complex matrix in the basis ``e_0..e_{N-1}``.

    ``lower[k]`` is the entry ``M[k+1, k]`` (coefficient of ``e_{k+1}`` in
    ``M e_k``) and ``upper[k]`` is ``M[k, k+1]`` (coefficient of ``e_k`` in
    ``M e_{k+1}``).
    """

    diag: np.ndarray
    lower: np.ndarray
    upper: np.ndarray
    params: GribovParams | None = field(default=None, compare=False)

    def __post_init__(self):
        n = len(self.diag)
        if len(self.lower) != n - 1 or len(self.upper) != n - 1:
            raise DimensionMismatchError("off-diagonals must have length N-1")

    @property
    def trunc(self) -> int:
        return len(self.diag)

    def to_dense(self) -> np.ndarray:
        m = np.diag(np.asarray(self.diag, dtype=complex))
        idx = np.arange(self.trunc - 1)
        m[idx + 1, idx] = self.lower
        m[idx, idx + 1] = self.upper
        return m

    def b0_block(self) -> np.ndarray:
        """Dense matrix restricted to ``B_0`` (indices ``1..N-1``)."""
        return self.to_dense()[1:, 1:]


def build_hamiltonian(params: GribovParams, trunc: int) -> BandedOperator:
    if trunc < 2:
        raise InvalidTruncationError(f"truncation order must be >= 2, got {trunc}")
    n = np.arange(trunc, dtype=float)
    diag = params.mu * n
    k = n[:-1]
    # H e_k = mu k e_k + i lam [ (k-1) sqrt(k) e_{k-1} + k sqrt(k+1) e_{k+1} ]
    off = 1j * (params.lam * k * np.sqrt(k + 1))
    return BandedOperator(diag=diag, lower=off.copy(), upper=off.copy(), params=params)


def apply_operator(op: BandedOperator, v: CoeffVector) -> CoeffVector:
    """Matrix-vector product at truncation order N.

    The component that ``M e_{N-1}`` would send to ``e_N`` is dropped; callers
    that need exactness must ignore the last output row.
    """
    _check_same(op.trunc, v.trunc)
    c = v.coeffs
    out = op.diag * c
    out[1:] += op.lower * c[:-1]
    out[:-1] += op.upper * c[1:]
    return CoeffVector(out)


def parity_conjugate(op: BandedOperator) -> BandedOperator:
    """``P M P^{-1}`` with ``P e_n = (-1)**n e_n``: off-diagonals flip sign."""
    params = op.params.flipped() if op.params is not None else None
    return BandedOperator(diag=op.diag.copy(), lower=-op.lower, upper=-op.upper, params=params)


def parity_vector(trunc: int) -> np.ndarray:
    return np.where(np.arange(trunc) % 2 == 0, 1.0, -1.0)


def annihilation_matrix(trunc: int) -> np.ndarray:
    """``A = d/dz``: ``A e_n = sqrt(n) e_{n-1}``."""
    n = np.arange(1, trunc)
    a = np.zeros((trunc, trunc))
    a[n - 1, n] = np.sqrt(n)
    return a


def creation_matrix(trunc: int) -> np.ndarray:
    return annihilation_matrix(trunc).T.copy()


def number_matrix(trunc: int) -> np.ndarray:
    return np.diag(np.arange(trunc, dtype=float))


def laguerre_factorization_residual(params: GribovParams, trunc: int) -> float:
    """Max-norm gap between ``mu A*A + i lam (D + D* - (A + A*))`` and the built matrix.

    Here ``D = A N`` and ``D* = N A*``.  Compared on the leading ``N-2`` block.
    """
    if trunc < 4:
        raise InvalidTruncationError(f"need trunc >= 4, got {trunc}")
    a = annihilation_matrix(trunc)
    ad = creation_matrix(trunc)
    num = number_matrix(trunc)
    d = a @ num
    dstar = num @ ad
    factored = params.mu * (ad @ a) + 1j * params.lam * (d + dstar - (a + ad))
    direct = build_hamiltonian(params, trunc).to_dense()
    k = trunc - 2
    return float(np.max(np.abs(factored[:k, :k] - direct[:k, :k])))


def inner_product(v: CoeffVector, w: CoeffVector) -> complex:
    """``<v, w>``, linear in ``v`` and conjugate-linear in ``w``."""
    _check_same(v.trunc, w.trunc)
    return complex(np.sum(v.coeffs * np.conj(w.coeffs)))


def bargmann_norm(v: CoeffVector) -> float:
    return float(np.linalg.norm(v.coeffs))


def evaluate_at(v: CoeffVector, z: complex) -> complex:
    """``sum_n c_n z**n / sqrt(n!)`` via ``t_n = t_{n-1} * z / sqrt(n)``."""
    total = 0j
    term = 1.0 + 0j
    for n, c in enumerate(v.coeffs):
        if n:
            term *= z / math.sqrt(n)
        total += c * term
    return total
