"""Composite Gauss-Legendre rules and product-integration helpers."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from numpy.polynomial import legendre


@lru_cache(maxsize=None)
def gauss_legendre(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and weights on [-1, 1]."""
    x, w = legendre.leggauss(n)
    x.flags.writeable = False
    w.flags.writeable = False
    return x, w


@lru_cache(maxsize=None)
def cumulative_matrix(n: int) -> np.ndarray:
    """``S[i, k] = int_{-1}^{x_i} l_k(t) dt`` for the Lagrange basis on the GL nodes.

    Applied to samples ``f(x_k)`` it integrates the degree ``n-1``
    interpolant from the left end of the reference panel up to each node.
    """
    x, _ = gauss_legendre(n)
    coeffs = np.linalg.inv(legendre.legvander(x, n - 1))
    s = np.empty((n, n))
    for k in range(n):
        s[:, k] = legendre.legval(x, legendre.legint(coeffs[:, k], lbnd=-1))
    s.flags.writeable = False
    return s


@dataclass(frozen=True, eq=False)
class PanelRule:
    """Composite rule: ``edges`` of the panels, flat ``nodes``/``weights``."""

    edges: np.ndarray
    order: int
    nodes: np.ndarray
    weights: np.ndarray

    @property
    def n_panels(self) -> int:
        return len(self.edges) - 1

    def panel_of(self, i: int) -> int:
        return i // self.order

    def integrate(self, values: np.ndarray) -> float:
        return float(np.dot(self.weights, values))


def panel_rule(edges, order: int) -> PanelRule:
    edges = np.asarray(edges, dtype=float)
    if edges.ndim != 1 or edges.size < 2 or np.any(np.diff(edges) <= 0):
        raise ValueError("panel edges must be strictly increasing with at least two entries")
    x, w = gauss_legendre(order)
    a, b = edges[:-1], edges[1:]
    half = (b - a)[:, None] / 2
    nodes = (a[:, None] + half * (x + 1)).ravel()
    weights = (half * w).ravel()
    return PanelRule(edges=edges, order=order, nodes=nodes, weights=weights)


def uniform_panels(lo: float, hi: float, n_panels: int, order: int) -> PanelRule:
    return panel_rule(np.linspace(lo, hi, n_panels + 1), order)
