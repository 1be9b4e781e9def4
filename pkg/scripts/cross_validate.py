"""Lowest eigenvalues from all four methods over a small parameter grid."""

import argparse
import json
import sys

from gribov import cli


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--pairs", default="1:0.5,1:0.25,2:0.5,1:1,1:2",
                    help="comma-separated mu:lambda pairs")
    ap.add_argument("--k", type=int, default=3)
    ap.add_argument("--trunc", type=int, default=512)
    ap.add_argument("--out", default="cross_validate.json")
    args = ap.parse_args(argv)

    rows = []
    ok = True
    for item in args.pairs.split(","):
        mu, lam = (float(v) for v in item.split(":"))
        cfg = cli.RunConfig(mu=mu, lam=lam, methods=("jacobi", "sturm", "shooting", "kernel"),
                            k=args.k, trunc=args.trunc)
        reports = [cli.RUNNERS[m](cfg) for m in cfg.methods]
        cmp = cli.compare_reports(reports, cli.comparison_tolerances(cfg))
        ok &= cmp["passed"]
        worst = {"/".join(p["methods"]): p["max_rel_delta"] for p in cmp["pairs"]}
        rows.append({"mu": mu, "lambda": lam, "passed": cmp["passed"], "max_rel_delta": worst,
                     "sigmas": {r.method: [s.real for s in r.sigmas] for r in reports}})
        print(f"mu={mu:<4} lambda={lam:<5} {'PASS' if cmp['passed'] else 'FAIL'} "
              f"worst pair delta {max(v for v in worst.values() if v is not None):.1e}")
    with open(args.out, "w") as fh:
        json.dump(rows, fh, indent=2, sort_keys=True)
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())
