"""Series solutions of the eigenvalue equation and of its bi-confluent Heun form.

The eigenvalue equation ``H phi = sigma phi`` reads

    i lam z phi'' + (mu z + i lam z**2) phi' - sigma phi = 0.

With ``z = i sqrt(2) xi`` and ``phi(z) = u(xi)`` it becomes the bi-confluent
Heun equation

    xi u'' + (1 + a - b xi - 2 xi**2) u' + ((g - a - 2) xi - (d + (1 + a) b) / 2) u = 0

with ``(a, b, g, d) = (-1, -rho sqrt(2), 1, 2 sqrt(2) sigma / lam)``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .bargmann import GribovParams
from .errors import InvalidTruncationError, LogarithmicCaseError

SQRT2 = math.sqrt(2.0)


@dataclass(frozen=True, eq=False)
class SeriesSolution:
    """A power series times an optional exponential prefactor.

    Near zero the value is ``x**exponent * sum_n coeffs[n] * x**n``.
    Near infinity it is
    ``exp(exp_quad x**2 + exp_lin x) * x**exponent * sum_n coeffs[n] * (arg_scale x)**(-n)``
    and the sum is asymptotic only, so evaluation truncates at the smallest term.
    """

    exponent: complex
    coeffs: np.ndarray
    alpha_param: complex
    point: str = "zero"
    variable: str = "z"
    exp_quad: complex = 0.0
    exp_lin: complex = 0.0
    arg_scale: complex = 1.0

    def __post_init__(self):
        c = np.array(self.coeffs, dtype=complex)
        if c.ndim != 1 or c.size == 0 or c[0] == 0:
            raise InvalidTruncationError("series needs a non-zero leading coefficient")
        c.flags.writeable = False
        object.__setattr__(self, "coeffs", c)
        if self.point not in ("zero", "infinity"):
            raise ValueError(f"unknown expansion point {self.point!r}")

    @property
    def trunc(self) -> int:
        return self.coeffs.size - 1

    def _terms(self, x: complex) -> np.ndarray:
        n = np.arange(self.coeffs.size)
        if self.point == "zero":
            return self.coeffs * np.power(complex(x), n)
        return self.coeffs * np.power(complex(self.arg_scale * x), -n)

    def _prefactor(self, x: complex) -> complex:
        x = complex(x)
        return np.exp(self.exp_quad * x * x + self.exp_lin * x) * x**self.exponent

    def evaluate(self, x: complex) -> complex:
        return self.evaluate_with_error(x)[0]

    def evaluate_with_error(self, x: complex) -> tuple[complex, float]:
        """Value and the size of the first omitted term (times the prefactor).

        Expansions at infinity stop just before the smallest term.
        """
        terms = self._terms(x)
        pre = self._prefactor(x)
        if self.point == "zero":
            return pre * terms.sum(), float(abs(pre * terms[-1]))
        mags = np.abs(terms)
        stop = int(np.argmin(mags[1:])) + 1 if mags.size > 1 else 1
        tail = float(abs(pre) * mags[stop]) if stop < mags.size else 0.0
        return pre * terms[:stop].sum(), tail

    def derivatives(self, x: complex) -> tuple[complex, complex, complex]:
        """``f, f', f''`` of a truncated series at zero (all terms kept)."""
        if self.point != "zero":
            raise ValueError("derivatives are only provided for expansions at zero")
        x = complex(x)
        p = self.exponent + np.arange(self.coeffs.size)
        c1 = self.coeffs * p
        c2 = c1 * (p - 1)
        # vanishing coefficients drop out (they would give 0 * inf at x = 0)
        f = np.sum(self.coeffs * _powers(x, p, self.coeffs))
        f1 = np.sum(c1 * _powers(x, p - 1, c1))
        f2 = np.sum(c2 * _powers(x, p - 2, c2))
        return complex(f), complex(f1), complex(f2)

    def to_dict(self) -> dict:
        return {
            "exponent": _pair(self.exponent),
            "alpha_param": _pair(self.alpha_param),
            "coeffs": [_pair(c) for c in self.coeffs],
            "point": self.point,
            "variable": self.variable,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


def _powers(x: complex, p: np.ndarray, c: np.ndarray) -> np.ndarray:
    out = np.zeros(p.size, dtype=complex)
    nz = c != 0
    out[nz] = x ** p[nz]
    return out


def _pair(c) -> list[float]:
    c = complex(c)
    return [c.real, c.imag]


@dataclass(frozen=True)
class BheParams:
    alpha: complex
    beta: complex
    gamma: complex
    delta: complex

    def astuple(self) -> tuple[complex, complex, complex, complex]:
        return (self.alpha, self.beta, self.gamma, self.delta)


def gribov_bhe_params(params: GribovParams, sigma: complex) -> BheParams:
    """Heun parameters for the variable ``xi = z / (i sqrt 2)``."""
    params.require_nonzero_lambda("the Heun reduction")
    return BheParams(-1.0, -params.rho * SQRT2, 1.0, 2.0 * SQRT2 * sigma / params.lam)


def xi_from_z(z: complex) -> complex:
    return complex(z) / (1j * SQRT2)


def frobenius_coefficients(
    params: GribovParams, sigma: complex, n_terms: int, exponent: int = 1
) -> SeriesSolution:
    """Series at ``z = 0`` for the eigenvalue equation.

    The analytic branch has exponent 1, ``phi = z * sum a_n z**n`` with

        (n+1) n a_n + i (sigma/lam - rho n) a_{n-1} + (n-1) a_{n-2} = 0,  a_0 = 1.

    The exponent 0 branch exists as a power series only for ``sigma = 0``
    (the constant vacuum); otherwise it carries a logarithm.
    """
    params.require_nonzero_lambda("the Frobenius reduction")
    if n_terms < 2:
        raise InvalidTruncationError(f"need at least 2 terms, got {n_terms}")
    rho = params.rho
    s_over_l = sigma / params.lam
    alpha = 1j * (s_over_l - rho)
    if exponent == 0:
        if sigma != 0:
            raise LogarithmicCaseError(
                "exponent 0 branch needs logarithmic terms unless sigma = 0"
            )
        a = np.zeros(n_terms, dtype=complex)
        a[0] = 1.0
        return SeriesSolution(0, a, alpha)
    if exponent != 1:
        raise ValueError("indicial exponents are 0 and 1")
    a = np.zeros(n_terms, dtype=complex)
    a[0] = 1.0
    for n in range(1, n_terms):
        prev2 = a[n - 2] if n >= 2 else 0.0
        a[n] = -(1j * (s_over_l - rho * n) * a[n - 1] + (n - 1) * prev2) / ((n + 1) * n)
    return SeriesSolution(1, a, alpha)


def eigen_equation_residual(params: GribovParams, sigma: complex, f, f1, f2, z) -> complex:
    """``i lam z f'' + (mu z + i lam z**2) f' - sigma f``."""
    lam, mu = params.lam, params.mu
    return 1j * lam * z * f2 + (mu * z + 1j * lam * z * z) * f1 - sigma * f


def bhe_residual(p: BheParams, f, f1, f2, xi) -> complex:
    a, b, g, d = p.astuple()
    return xi * f2 + (1 + a - b * xi - 2 * xi * xi) * f1 + ((g - a - 2) * xi - 0.5 * (d + (1 + a) * b)) * f


def bhe_recurrence_coefficients(p: BheParams, n_terms: int) -> np.ndarray:
    """``A_0..A_{n_terms-1}`` of the three-term recurrence at zero.

    ``A_1`` is the value the recurrence gives at ``n = -1`` with ``A_{-1} = 0``.
    """
    a, b, g, d = p.astuple()
    half = 0.5 * (d + b * (1 + a))
    A = np.zeros(max(n_terms, 2), dtype=complex)
    A[0] = 1.0
    A[1] = half
    for n in range(0, n_terms - 2):
        A[n + 2] = (b * (n + 1) + half) * A[n + 1] - (g - 2 - a - 2 * n) * (n + 1) * (n + 1 + a) * A[n]
    return A[:n_terms]


def _is_integer(x: complex, tol: float = 1e-12) -> bool:
    x = complex(x)
    return abs(x.imag) <= tol and abs(x.real - round(x.real)) <= tol


def bhe_series_at_zero(p: BheParams, n_terms: int, branch: int = 0) -> SeriesSolution:
    """Frobenius solution of the Heun equation at ``xi = 0``.

    Branch 0 has exponent 0; branch 1 is ``xi**(-alpha)`` times the branch 0
    series with ``alpha`` negated.  Coefficients are normalized to start at 1:
    ``c_n = A_n / (n! (alpha+1)...(alpha+n))``.
    """
    if n_terms < 2:
        raise InvalidTruncationError(f"need at least 2 terms, got {n_terms}")
    if _is_integer(p.alpha):
        raise LogarithmicCaseError(
            f"alpha = {p.alpha} is an integer; the second solution has logarithmic terms"
        )
    if branch not in (0, 1):
        raise ValueError("branch must be 0 or 1")
    a = p.alpha if branch == 0 else -p.alpha
    q = BheParams(a, p.beta, p.gamma, p.delta)
    A = bhe_recurrence_coefficients(q, n_terms)
    c = np.empty(n_terms, dtype=complex)
    scale = 1.0 + 0j
    for n in range(n_terms):
        if n:
            scale *= n * (a + n)
        c[n] = A[n] / scale
    return SeriesSolution(0 if branch == 0 else -p.alpha, c, p.alpha, variable="xi")


def thome_coefficients(p: BheParams, n_terms: int) -> np.ndarray:
    a, b, g, d = p.astuple()
    c = np.zeros(max(n_terms, 2), dtype=complex)
    c[0] = 1.0
    c[1] = 0.25 * (d + b * (g - 1))
    for n in range(0, n_terms - 2):
        c[n + 2] = (
            (0.5 * (d + b * (g - 1)) - b * (n + 1)) * c[n + 1]
            - ((g - a - 2) / 2 - n) * ((g + a - 2) / 2 - n) * c[n]
        ) / (2 * (n + 2))
    return c[:n_terms]


def thome_series_at_infinity(p: BheParams, n_terms: int) -> tuple[SeriesSolution, SeriesSolution]:
    """Formal solutions at ``xi = infinity``: (recessive, dominant).

    Recessive: ``xi**((g-a-2)/2) sum c_n xi**(-n)``.
    Dominant: ``exp(xi**2 + b xi) xi**(-(g+a+2)/2) sum c'_n (i xi)**(-n)`` where
    ``c'`` are the recessive coefficients for ``(a, i b, -g, -i d)``.
    """
    if n_terms < 2:
        raise InvalidTruncationError(f"need at least 2 terms, got {n_terms}")
    a, b, g, d = p.astuple()
    rec = SeriesSolution(
        (g - a - 2) / 2, thome_coefficients(p, n_terms), a, point="infinity", variable="xi"
    )
    q = BheParams(a, 1j * b, -g, -1j * d)
    dom = SeriesSolution(
        -(g + a + 2) / 2,
        thome_coefficients(q, n_terms),
        a,
        point="infinity",
        variable="xi",
        exp_quad=1.0,
        exp_lin=b,
        arg_scale=1j,
    )
    return rec, dom


def recessive_series_z(params: GribovParams, sigma: complex, n_terms: int) -> np.ndarray:
    """Experimental cross-check: bounded solution at infinity in the ``z`` chart.

    ``phi = sum a_j z**(-j)`` with ``(j+1) a_{j+1} = i (rho j + sigma/lam) a_j + j (j-1) a_{j-1}``.
    Equals the recessive Heun coefficients times ``(i sqrt 2)**j``.
    """
    params.require_nonzero_lambda("the expansion at infinity")
    rho, sl = params.rho, sigma / params.lam
    a = np.zeros(n_terms, dtype=complex)
    a[0] = 1.0
    for j in range(0, n_terms - 1):
        prev = a[j - 1] if j >= 1 else 0.0
        a[j + 1] = (1j * (rho * j + sl) * a[j] + j * (j - 1) * prev) / (j + 1)
    return a
