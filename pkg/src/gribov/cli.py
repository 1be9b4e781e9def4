"""Command-line front end.

Subcommands: ``spectrum``, ``series``, ``kernel``, ``validate``, ``report``.
Exit codes: 0 pass, 1 invariant failure, 2 configuration error,
3 numerical non-convergence.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from . import halfline, heun, jacobi, kernel, shooting
from .bargmann import (
    CoeffVector,
    GribovParams,
    build_hamiltonian,
    laguerre_factorization_residual,
    parity_conjugate,
)
from .errors import ConfigurationError, GribovError
from .report import METHODS, EigenvalueEntry, SpectralReport, compare_reports

DEFAULT_TOLERANCES = {
    "cross": 1e-6,
    "kernel": 1e-4,
    "real": 1e-8,
    "ortho": 1e-8,
    "bound": 1e-8,
    "completeness": 1e-6,
    "shoot": 1e-6,
    "hs": 1e-4,
    "identity": 1e-12,
}


@dataclass(frozen=True)
class RunConfig:
    mu: float
    lam: float
    methods: tuple[str, ...] = ("jacobi",)
    k: int = 5
    trunc: int = 512
    grid: int = 4000
    out: str = "out"
    fmt: str = "json"
    tolerances: dict = field(default_factory=lambda: dict(DEFAULT_TOLERANCES))
    notes: tuple[str, ...] = ()

    def __post_init__(self):
        if not self.methods:
            raise ConfigurationError("at least one method is required")
        bad = [m for m in self.methods if m not in METHODS]
        if bad:
            raise ConfigurationError(f"unknown methods {bad}; choose from {list(METHODS)}")
        if self.k < 1:
            raise ConfigurationError("k must be positive")
        if self.trunc < 2 or self.grid < 100:
            raise ConfigurationError("trunc must be >= 2 and grid >= 100")
        if self.fmt not in ("json", "csv"):
            raise ConfigurationError("format must be json or csv")
        for name, value in self.tolerances.items():
            if not value > 0:
                raise ConfigurationError(f"tolerance {name} must be positive, got {value}")

    @property
    def params(self) -> GribovParams:
        return GribovParams(self.mu, self.lam)

    def tol(self, name: str) -> float:
        return float(self.tolerances[name])


def normalized(config: RunConfig) -> RunConfig:
    """Flip a negative coupling to ``|lambda|``; the spectrum is unchanged by parity."""
    if config.lam < 0:
        note = f"lambda={config.lam} replaced by {-config.lam} (parity maps one spectrum onto the other)"
        return replace(config, lam=-config.lam, notes=config.notes + (note,))
    return config


def _methods(text) -> tuple[str, ...]:
    if isinstance(text, (list, tuple)):
        return tuple(str(t).strip() for t in text)
    return tuple(t.strip() for t in str(text).split(",") if t.strip())


def config_from_args(args: argparse.Namespace) -> RunConfig:
    """Merge a JSON config file (if any) with command-line flags; flags win."""
    base: dict = {}
    if getattr(args, "config", None):
        try:
            base = json.loads(Path(args.config).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigurationError(f"cannot read config {args.config}: {exc}") from exc
    tol = dict(DEFAULT_TOLERANCES)
    tol.update(base.get("tolerances", {}))
    for name in DEFAULT_TOLERANCES:
        v = getattr(args, f"tol_{name}", None)
        if v is not None:
            tol[name] = v

    def pick(flag, key, default):
        v = getattr(args, flag, None)
        if v is not None:
            return v
        return base.get(key, default)

    mu = pick("mu", "mu", None)
    lam = pick("lam", "lambda", None)
    if mu is None or lam is None:
        raise ConfigurationError("--mu and --lambda are required (flag or config file)")
    cfg = RunConfig(
        mu=float(mu),
        lam=float(lam),
        methods=_methods(pick("methods", "methods", "jacobi")),
        k=int(pick("k", "k", 5)),
        trunc=int(pick("trunc", "trunc", 512)),
        grid=int(pick("grid", "grid", 4000)),
        out=str(pick("out", "out", "out")),
        fmt=str(pick("format", "format", "json")),
        tolerances=tol,
    )
    return normalized(cfg)


# pipelines

def run_jacobi(cfg: RunConfig) -> SpectralReport:
    t0 = time.perf_counter()
    p = cfg.params
    op = build_hamiltonian(p, cfg.trunc)
    ref = 2 * cfg.trunc
    pairs = jacobi.eigen_spectrum(op, min(cfg.k, cfg.trunc - 1), reference_trunc=ref)
    rows = [(cfg.trunc, tuple(pr.sigma for pr in pairs))]
    if p.lam != 0:
        rows.append((ref, tuple(complex(s) for s in jacobi.eigenvalues(p, ref, len(pairs)))))
    return SpectralReport(
        method="jacobi", params=p, trunc={"N": cfg.trunc, "reference_N": ref if p.lam != 0 else cfg.trunc},
        eigenvalues=tuple(pr.entry() for pr in pairs), convergence=tuple(rows),
        wall_time=time.perf_counter() - t0, notes=cfg.notes,
    )


def run_sturm(cfg: RunConfig) -> SpectralReport:
    _, rep = halfline.sturm_spectrum(cfg.params, cfg.k, M=cfg.grid, tol_shift=min(1e-7, cfg.tol("cross")))
    return replace(rep, notes=cfg.notes)


def run_shooting(cfg: RunConfig) -> SpectralReport:
    t0 = time.perf_counter()
    results = shooting.shoot_spectrum(cfg.params, cfg.k)
    entries = tuple(
        EigenvalueEntry(complex(r.sigma), abs(r.growth_indicator), r.converged and abs(r.growth_indicator) <= cfg.tol("shoot"))
        for r in results
    )
    Y = shooting.ShootingConfig().end_point(cfg.params.rho)
    return SpectralReport(
        method="shooting", params=cfg.params, trunc={"Y": Y, "eps": shooting.ShootingConfig().eps},
        eigenvalues=entries, wall_time=time.perf_counter() - t0, notes=cfg.notes,
    )


def run_kernel(cfg: RunConfig) -> SpectralReport:
    t0 = time.perf_counter()
    p = cfg.params
    coarse = kernel.nystrom_spectrum(p, kernel.positive_grid(p), cfg.k)
    Y = kernel.default_extent(p)
    fine_grid = kernel.positive_grid(p, Y, 2 * int(np.ceil(Y)))
    fine = kernel.nystrom_spectrum(p, fine_grid, cfg.k)
    a, b = coarse.sigmas, fine.sigmas
    conv = np.abs(a - b) <= 1e-8 * np.abs(b)
    return SpectralReport(
        method="kernel", params=p,
        trunc={"Y": Y, "panels": fine_grid.rule.n_panels, "order": fine_grid.rule.order},
        eigenvalues=tuple(EigenvalueEntry(complex(s), float(abs(s - t)), bool(c)) for s, t, c in zip(b, a, conv)),
        convergence=((coarse.grid.nodes.size, tuple(complex(s) for s in a)), (fine_grid.nodes.size, tuple(complex(s) for s in b))),
        wall_time=time.perf_counter() - t0, notes=cfg.notes,
    )


RUNNERS = {"jacobi": run_jacobi, "sturm": run_sturm, "shooting": run_shooting, "kernel": run_kernel}


def comparison_tolerances(cfg: RunConfig) -> dict:
    tol = {}
    for i, a in enumerate(METHODS):
        for b in METHODS[i + 1:]:
            tol[(a, b)] = cfg.tol("kernel") if "kernel" in (a, b) else cfg.tol("cross")
    return tol


def _write(out: Path, name: str, payload: str) -> Path:
    out.mkdir(parents=True, exist_ok=True)
    path = out / name
    path.write_text(payload)
    return path


def _serialize(report: SpectralReport, fmt: str) -> tuple[str, str]:
    if fmt == "csv":
        return f"{report.method}.csv", report.to_csv()
    return f"{report.method}.json", report.to_json()


def cmd_spectrum(cfg: RunConfig) -> int:
    out = Path(cfg.out)
    reports = []
    timings = {}
    for m in cfg.methods:
        rep = RUNNERS[m](cfg)
        reports.append(rep)
        timings[m] = rep.wall_time
        _write(out, *_serialize(rep, cfg.fmt))
    _write(out, "timings.json", json.dumps(timings, indent=2, sort_keys=True))
    status = 0
    if len(reports) > 1:
        cmp = compare_reports(reports, comparison_tolerances(cfg))
        _write(out, "comparison.json", json.dumps(_jsonable(cmp), indent=2, sort_keys=True))
        status = 0 if cmp["passed"] else 1
        for pair in cmp["pairs"]:
            print(f"{'PASS' if pair['passed'] else 'FAIL'} {pair['methods'][0]} vs {pair['methods'][1]}: "
                  f"max rel delta {pair['max_rel_delta']}")
    for rep in reports:
        print(f"{rep.method}: " + ", ".join(f"{e.sigma.real:.12g}" for e in rep.eigenvalues))
    return status


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    return obj


def cmd_series(args: argparse.Namespace, cfg: RunConfig) -> int:
    p = cfg.params
    kind = args.kind
    sigma = args.sigma
    if kind == "frobenius":
        sols = {"frobenius": heun.frobenius_coefficients(p, sigma, args.terms)}
    elif kind == "zero":
        bp = _bhe_params(args, p, sigma)
        sols = {"branch0": heun.bhe_series_at_zero(bp, args.terms, 0),
                "branch1": heun.bhe_series_at_zero(bp, args.terms, 1)}
    else:
        bp = _bhe_params(args, p, sigma)
        rec, dom = heun.thome_series_at_infinity(bp, args.terms)
        sols = {"recessive": rec, "dominant": dom}
    payload = {name: s.to_dict() for name, s in sols.items()}
    path = _write(Path(cfg.out), f"series_{kind}.json", json.dumps(payload, indent=2, sort_keys=True))
    print(path)
    return 0


def _bhe_params(args, p: GribovParams, sigma: float) -> heun.BheParams:
    explicit = [args.alpha, args.beta, args.gamma, args.delta]
    if all(v is not None for v in explicit):
        return heun.BheParams(*(complex(v) for v in explicit))
    if any(v is not None for v in explicit):
        raise ConfigurationError("give all of --alpha --beta --gamma --delta or none")
    return heun.gribov_bhe_params(p, sigma)


def cmd_kernel(args: argparse.Namespace, cfg: RunConfig) -> int:
    p = cfg.params
    out = Path(cfg.out)
    summary: dict = {"mu": p.mu, "lambda": p.lam}
    status = 0
    if args.axis == "positive":
        grid = kernel.positive_grid(p)
        res = kernel.nystrom_spectrum(p, grid, cfg.k, strict=False)
        summary["nystrom"] = {
            "sigmas": [float(s.real) for s in res.sigmas],
            "separation": res.separation,
            "positive_eigenvector": res.positive,
        }
        status = 0 if res.positive and res.separation < 1 else 1
    else:
        grid = kernel.negative_grid(p, args.kernel_y)
        chk = kernel.negative_kernel_checks(grid)
        hs = kernel.hs_norm_estimate(p, tol=cfg.tol("hs"), strict=False)
        perron = kernel.negative_axis_perron(grid)
        summary["signs"] = {"nonnegative": chk.nonnegative, "dominated": chk.dominated, "max_ratio": chk.max_ratio}
        summary["hs"] = {
            "levels": [list(l) for l in hs.levels], "values": hs.values.tolist(),
            "dominating": hs.dominating.tolist(), "rel_changes": hs.rel_changes.tolist(), "saturated": hs.saturated,
        }
        summary["perron"] = {"kappa": perron.kappa, "separation": perron.separation, "positive": perron.positive,
                             "sigma_from_eigenrelation": perron.sigma_from_eigenrelation}
        status = 0 if (chk.nonnegative and chk.dominated and hs.saturated and perron.positive) else 1
    if cfg.fmt == "csv":
        _write(out, f"kernel_{args.axis}.csv", grid.to_csv())
    _write(out, f"kernel_{args.axis}.json", json.dumps(_jsonable(summary), indent=2, sort_keys=True))
    print(json.dumps(_jsonable(summary), sort_keys=True))
    return status


def validate_suite(cfg: RunConfig) -> dict:
    """All invariant checks for one parameter pair."""
    p = cfg.params
    checks: dict = {}
    n = min(cfg.trunc, 256)
    op = build_hamiltonian(p, n)
    m = op.to_dense()
    checks["complex_symmetric"] = bool(np.array_equal(m, m.T))
    flipped = build_hamiltonian(p.flipped(), n).to_dense()
    checks["parity_identity"] = bool(np.array_equal(parity_conjugate(op).to_dense(), flipped))
    checks["laguerre_identity"] = laguerre_factorization_residual(p, min(n, 64)) <= cfg.tol("identity")
    pairs = jacobi.eigen_spectrum(op, min(40, n - 1))
    worst, real_ok = jacobi.reality_check(pairs, cfg.tol("real"))
    checks["reality"] = real_ok
    if p.mu != 0:
        checks["lower_bound"] = jacobi.lower_bound_check(pairs, p, cfg.tol("bound"), strict=False).passed
    if p.lam != 0:
        conv = [q for q in pairs if q.converged][:8]
        g = jacobi.biorthogonality_matrix(conv)
        checks["biorthogonality"] = jacobi.max_offdiagonal(g, [q.sigma for q in conv]) <= cfg.tol("ortho")
        target = CoeffVector(np.r_[0.0, 1.0, 1.0, np.zeros(n - 3)])
        comp = jacobi.completeness_residual(pairs, target, "projection")
        checks["completeness"] = comp.first_below(cfg.tol("completeness")) is not None
    if p.mu > 0 and p.lam > 0:
        res = kernel.nystrom_spectrum(p, kernel.positive_grid(p), 3, strict=False)
        checks["kernel_perron"] = res.positive and res.separation < 1
        grid = kernel.negative_grid(p, 20.0)
        sign = kernel.negative_kernel_checks(grid)
        checks["kernel_sign"] = sign.nonnegative and sign.dominated
        cross_cfg = replace(cfg, k=3, trunc=max(cfg.trunc, 512), methods=("jacobi", "sturm", "shooting", "kernel"))
        reports = [RUNNERS[mth](cross_cfg) for mth in cross_cfg.methods]
        cmp = compare_reports(reports, comparison_tolerances(cross_cfg))
        checks["cross_method"] = cmp["passed"]
    return {k: bool(v) for k, v in checks.items()}


def cmd_validate(cfg: RunConfig) -> int:
    checks = validate_suite(cfg)
    payload = {"mu": cfg.mu, "lambda": cfg.lam, "checks": checks, "passed": all(checks.values()), "notes": list(cfg.notes)}
    _write(Path(cfg.out), "validate.json", json.dumps(payload, indent=2, sort_keys=True))
    for name, ok in checks.items():
        print(f"{'PASS' if ok else 'FAIL'} {name}")
    return 0 if payload["passed"] else 1


def cmd_report(args: argparse.Namespace, cfg_tol: dict) -> int:
    paths = [Path(p) for p in args.inputs]
    files = []
    for p in paths:
        files.extend(sorted(p.glob("*.json")) if p.is_dir() else [p])
    reports = []
    for f in files:
        data = json.loads(f.read_text())
        if isinstance(data, dict) and data.get("method") in METHODS:
            reports.append(SpectralReport.from_dict(data))
    if len(reports) < 2:
        raise ConfigurationError(f"need at least two method reports, found {len(reports)}")
    tol = {}
    for i, a in enumerate(METHODS):
        for b in METHODS[i + 1:]:
            tol[(a, b)] = cfg_tol["kernel"] if "kernel" in (a, b) else cfg_tol["cross"]
    cmp = compare_reports(reports, tol)
    text = json.dumps(_jsonable(cmp), indent=2, sort_keys=True)
    if args.out:
        _write(Path(args.out), "comparison.json", text)
    for pair in cmp["pairs"]:
        print(f"{'PASS' if pair['passed'] else 'FAIL'} {pair['methods'][0]} vs {pair['methods'][1]}: "
              f"max rel delta {pair['max_rel_delta']}")
    return 0 if cmp["passed"] else 1


def _add_common(p: argparse.ArgumentParser, methods: bool = False) -> None:
    p.add_argument("--mu", type=float)
    p.add_argument("--lambda", dest="lam", type=float)
    p.add_argument("--k", type=int)
    p.add_argument("--trunc", type=int, help="Jacobi truncation order N")
    p.add_argument("--grid", type=int, help="half-line grid points M")
    p.add_argument("--out", help="output directory")
    p.add_argument("--format", choices=("json", "csv"))
    p.add_argument("--config", help="JSON file mirroring these flags")
    for name in DEFAULT_TOLERANCES:
        p.add_argument(f"--tol-{name}", dest=f"tol_{name}", type=float)
    if methods:
        p.add_argument("--methods", help="comma-separated subset of " + ",".join(METHODS))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="gribov", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    sp = sub.add_parser("spectrum", help="eigenvalues from one or more methods")
    _add_common(sp, methods=True)
    se = sub.add_parser("series", help="series coefficients at 0 or infinity")
    _add_common(se)
    se.add_argument("--sigma", type=float, required=True)
    se.add_argument("--terms", type=int, default=20)
    se.add_argument("--kind", choices=("frobenius", "zero", "thome"), default="frobenius")
    for name in ("alpha", "beta", "gamma", "delta"):
        se.add_argument(f"--{name}", type=float)
    ke = sub.add_parser("kernel", help="inverse kernels, positivity and Hilbert-Schmidt data")
    _add_common(ke)
    ke.add_argument("--axis", choices=("positive", "negative"), default="positive")
    ke.add_argument("--kernel-y", dest="kernel_y", type=float, default=20.0)
    va = sub.add_parser("validate", help="run the invariant suite")
    _add_common(va)
    rp = sub.add_parser("report", help="compare existing method reports")
    rp.add_argument("inputs", nargs="+", help="report files or directories")
    rp.add_argument("--out")
    for name in DEFAULT_TOLERANCES:
        rp.add_argument(f"--tol-{name}", dest=f"tol_{name}", type=float)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "report":
            tol = dict(DEFAULT_TOLERANCES)
            for name in DEFAULT_TOLERANCES:
                if getattr(args, f"tol_{name}") is not None:
                    tol[name] = getattr(args, f"tol_{name}")
            return cmd_report(args, tol)
        cfg = config_from_args(args)
        for note in cfg.notes:
            print(f"note: {note}", file=sys.stderr)
        if args.command == "spectrum":
            return cmd_spectrum(cfg)
        if args.command == "series":
            return cmd_series(args, cfg)
        if args.command == "kernel":
            return cmd_kernel(args, cfg)
        return cmd_validate(cfg)
    except GribovError as exc:
        record = {"error": type(exc).__name__, "message": str(exc), "exit_code": exc.exit_code}
        print(json.dumps(record), file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
