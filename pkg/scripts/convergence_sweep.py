"""Jacobi self-convergence: lowest eigenvalues against truncation order N.

Writes a CSV with one row per (N, index) and prints the converged digits.
"""

import argparse
import csv
import sys

from gribov import jacobi
from gribov.bargmann import GribovParams


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--mu", type=float, default=1.0)
    ap.add_argument("--lambda", dest="lam", type=float, default=0.5)
    ap.add_argument("--k", type=int, default=8)
    ap.add_argument("--n-list", default="64,128,256,512,1024")
    ap.add_argument("--out", default="convergence_sweep.csv")
    args = ap.parse_args(argv)

    n_list = [int(n) for n in args.n_list.split(",")]
    rep = jacobi.convergence_study(GribovParams(args.mu, args.lam), n_list, args.k)
    with open(args.out, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["N", "index", "re", "im"])
        for n, sig in rep.convergence:
            for j, s in enumerate(sig, start=1):
                w.writerow([n, j, repr(s.real), repr(s.imag)])
    digits = jacobi.converged_digits(rep)
    print("N pair      " + " ".join(f"s{j:<5d}" for j in range(1, args.k + 1)))
    for (n0, _), (n1, _), row in zip(rep.convergence[:-1], rep.convergence[1:], digits):
        print(f"{n0:>4}->{n1:<5} " + " ".join(f"{d:6.1f}" for d in row))
    print("converged at N =", n_list[-1], ":", rep.converged_mask.astype(int).tolist())
    return 0


if __name__ == "__main__":
    sys.exit(main())
