"""Method-agnostic spectral report and cross-method comparison."""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field

import numpy as np

from .bargmann import GribovParams

METHODS = ("jacobi", "shooting", "sturm", "kernel")


@dataclass(frozen=True)
class EigenvalueEntry:
    sigma: complex
    residual: float = float("nan")
    converged: bool = True

    def to_dict(self) -> dict:
        return {
            "re": float(self.sigma.real),
            "im": float(self.sigma.imag),
            "residual": _finite_or_none(self.residual),
            "converged": bool(self.converged),
        }


def _finite_or_none(x: float):
    return float(x) if math.isfinite(x) else None


@dataclass(frozen=True)
class SpectralReport:
    """Eigenvalues from one method, sorted by real part.

    ``wall_time`` is kept off the JSON so that identical configurations give
    identical files.
    """

    method: str
    params: GribovParams
    trunc: dict
    eigenvalues: tuple[EigenvalueEntry, ...]
    convergence: tuple[tuple[int, tuple[complex, ...]], ...] = ()
    wall_time: float = field(default=float("nan"), compare=False)
    notes: tuple[str, ...] = ()

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValueError(f"unknown method {self.method!r}")
        ordered = tuple(sorted(self.eigenvalues, key=lambda e: (e.sigma.real, e.sigma.imag)))
        object.__setattr__(self, "eigenvalues", ordered)
        ns = [n for n, _ in self.convergence]
        if ns != sorted(ns):
            raise ValueError("convergence table must be ordered by truncation")

    @property
    def sigmas(self) -> np.ndarray:
        return np.array([e.sigma for e in self.eigenvalues])

    @property
    def converged_mask(self) -> np.ndarray:
        return np.array([e.converged for e in self.eigenvalues], dtype=bool)

    def to_dict(self) -> dict:
        return {
            "method": self.method,
            "mu": float(self.params.mu),
            "lambda": float(self.params.lam),
            "trunc": self.trunc,
            "eigenvalues": [e.to_dict() for e in self.eigenvalues],
            "convergence": [
                {"N": int(n), "sigmas": [[float(complex(s).real), float(complex(s).imag)] for s in sig]}
                for n, sig in self.convergence
            ],
            "notes": list(self.notes),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    @classmethod
    def from_dict(cls, d: dict) -> "SpectralReport":
        eig = tuple(
            EigenvalueEntry(
                complex(e["re"], e["im"]),
                e["residual"] if e.get("residual") is not None else float("nan"),
                bool(e.get("converged", True)),
            )
            for e in d["eigenvalues"]
        )
        conv = tuple(
            (int(c["N"]), tuple(complex(re, im) for re, im in c["sigmas"])) for c in d.get("convergence", [])
        )
        return cls(
            method=d["method"],
            params=GribovParams(d["mu"], d["lambda"]),
            trunc=d.get("trunc", {}),
            eigenvalues=eig,
            convergence=conv,
            notes=tuple(d.get("notes", ())),
        )

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf)
        w.writerow(["index", "re", "im", "residual", "converged"])
        for i, e in enumerate(self.eigenvalues, start=1):
            w.writerow([i, repr(float(e.sigma.real)), repr(float(e.sigma.imag)), repr(float(e.residual)), int(e.converged)])
        return buf.getvalue()


def compare_reports(reports: list[SpectralReport], tolerances: dict[tuple[str, str], float] | float) -> dict:
    """Pairwise relative deltas over eigenvalues both methods flag as converged.

    Eigenvalues are matched by index in the sorted lists.
    """
    pairs = []
    ok = True
    for i, a in enumerate(reports):
        for b in reports[i + 1:]:
            key = (a.method, b.method)
            tol = tolerances if isinstance(tolerances, float) else tolerances.get(key, tolerances.get(key[::-1], 1e-6))
            n = min(len(a.eigenvalues), len(b.eigenvalues))
            deltas = []
            for j in range(n):
                ea, eb = a.eigenvalues[j], b.eigenvalues[j]
                comparable = ea.converged and eb.converged
                rel = abs(ea.sigma - eb.sigma) / max(abs(ea.sigma), abs(eb.sigma), 1e-300)
                deltas.append({"index": j + 1, "rel_delta": float(rel), "comparable": bool(comparable)})
            comparable = [d["rel_delta"] for d in deltas if d["comparable"]]
            max_rel = max(comparable) if comparable else None
            passed = bool(comparable) and max_rel <= tol
            ok &= passed
            pairs.append({
                "methods": list(key), "tolerance": tol, "max_rel_delta": max_rel,
                "passed": passed, "deltas": deltas,
            })
    return {"pairs": pairs, "passed": bool(ok)}
