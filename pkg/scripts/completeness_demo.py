"""Expansion of e1 + e2 on the first k eigenvectors, two ways.

The orthogonal projection onto the span decreases monotonically.  The
expansion with parity-twisted biorthogonal coefficients does not: the
eigenvectors are far from orthogonal, so the coefficients grow with k.
"""

import argparse
import sys

import numpy as np

from gribov import jacobi
from gribov.bargmann import CoeffVector, GribovParams, build_hamiltonian


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--mu", type=float, default=1.0)
    ap.add_argument("--lambda", dest="lam", type=float, default=0.5)
    ap.add_argument("--trunc", type=int, default=256)
    ap.add_argument("--kmax", type=int, default=40)
    args = ap.parse_args(argv)

    p = GribovParams(args.mu, args.lam)
    pairs = jacobi.eigen_spectrum(build_hamiltonian(p, args.trunc), args.kmax)
    target = CoeffVector(np.r_[0.0, 1.0, 1.0, np.zeros(args.trunc - 3)])
    proj = jacobi.completeness_residual(pairs, target, "projection")
    bio = jacobi.completeness_residual(pairs, target, "biorthogonal")
    print(" k   projection   biorthogonal")
    for k in range(args.kmax):
        print(f"{k + 1:2d}   {proj.residuals[k]:.3e}    {bio.residuals[k]:.3e}")
    print("projection residual below 1e-6 at k =", proj.first_below(1e-6))
    return 0


if __name__ == "__main__":
    sys.exit(main())
