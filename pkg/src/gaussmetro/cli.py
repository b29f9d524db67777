"""Command-line front end: parameter scans, figure data bundles, SLD reports, oracle checks."""
from __future__ import annotations

import argparse
import csv
import io
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import Callable, Iterable, Sequence

import numpy as np

from . import formulas
from .fidelity import DEFAULT_DPHI, qfi_fidelity
from .fock import TruncationError
from .gaussian_core import InvalidStateError
from .observables import (UnusableWorkingPoint, build_m_caves, error_propagation,
                          fit_positive_scale, quadratic_to_ladder, sld_pure)
from .schemes import (FIG1_R, FIG2_R, SCHEMES, SchemeConfig, build_family, default_phi_grid,
                      fig4_configs, fig4_nbar, fisher_vs_phi, fwhm_scaling,
                      matched_benchmark_qfi)

EXIT_OK, EXIT_USAGE, EXIT_NUMERIC = 0, 1, 2
FIGURES = ("fig1", "fig2", "fig4", "figS1", "figS2")
DEFAULT_ETA_GRID = "0.02:1.0:0.02"


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # argparse would exit with status 2
        raise UsageError(message)


# -- parsing helpers ---------------------------------------------------------------

def parse_grid(spec: str) -> np.ndarray:
    """``start:stop:step`` with ``stop`` included when it lies on the grid."""
    try:
        start, stop, step = (float(x) for x in spec.split(":"))
    except ValueError:
        raise UsageError(f"grid must be start:stop:step, got {spec!r}") from None
    if step <= 0:
        raise UsageError("grid step must be positive")
    if stop < start:
        raise UsageError(f"grid {spec!r} is empty")
    count = int(np.floor((stop - start) / step + 1e-9)) + 1
    return np.round(start + step * np.arange(count), 12)


def read_config(path: str) -> dict[str, str]:
    """Flat ``key = value`` file; ``#`` starts a comment."""
    out: dict[str, str] = {}
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read config {path}: {exc}") from None
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{lineno}: expected key=value")
        key, value = (s.strip() for s in line.split("=", 1))
        out[key.replace("-", "_")] = value
    return out


PRESETS: dict[str, dict[str, object]] = {
    "fig1": {"scheme": "ancilla_tmsv", "r": FIG1_R, "alpha": 0.0, "eta_grid": DEFAULT_ETA_GRID},
    "fig2": {"scheme": "caves", "r": FIG2_R, "alpha": float(np.sinh(FIG2_R)), "theta": 0.0,
             "eta_grid": DEFAULT_ETA_GRID},
    "fig4": {"eta_grid": DEFAULT_ETA_GRID},
}

PARAM_TYPES: dict[str, Callable[[str], object]] = {
    "scheme": str, "r": float, "alpha": float, "theta": float, "phi": float, "dphi": float,
    "eta": float, "eta_grid": str, "cutoff": int, "workers": int, "preset": str,
}

DEFAULTS: dict[str, object] = {
    "r": 0.0, "alpha": 0.0, "theta": 0.0, "phi": 0.0, "dphi": DEFAULT_DPHI, "eta": 1.0,
    "eta_grid": DEFAULT_ETA_GRID, "workers": 1,
}


def resolve(args: argparse.Namespace, keys: Iterable[str]) -> dict[str, object]:
    """Merge parameters with precedence flags > config file > preset > defaults."""
    config = read_config(args.config) if getattr(args, "config", None) else {}
    preset_name = getattr(args, "preset", None) or config.get("preset")
    preset: dict[str, object] = {}
    if preset_name:
        if preset_name not in PRESETS:
            raise UsageError(f"unknown preset {preset_name!r}; choose from {', '.join(PRESETS)}")
        preset = PRESETS[preset_name]
    out: dict[str, object] = {"preset": preset_name}
    for key in keys:
        flag = getattr(args, key, None)
        if flag is not None:
            out[key] = flag
        elif key in config:
            try:
                out[key] = PARAM_TYPES[key](config[key])
            except (KeyError, ValueError):
                raise UsageError(f"bad config value {key}={config[key]!r}") from None
        elif key in preset:
            out[key] = preset[key]
        else:
            out[key] = DEFAULTS.get(key)
    return out


# -- output -------------------------------------------------------------------------

def fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, str):
        return x
    if isinstance(x, (int, np.integer)) and not isinstance(x, bool):
        return str(int(x))
    x = float(x)
    if not np.isfinite(x):
        return "nan" if np.isnan(x) else ("inf" if x > 0 else "-inf")
    s = f"{x:.12g}"
    return "0" if s == "-0" else s


def to_csv(header: Sequence[str], rows: Iterable[Sequence]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([fmt(v) for v in row])
    return buf.getvalue()


def emit(text: str, out: str | None) -> None:
    if out is None or out == "-":
        sys.stdout.write(text)
        return
    path = Path(out)
    try:
        with open(path, "w", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise UsageError(f"cannot write {path}: {exc}") from None


def pmap(fn: Callable, items: Sequence, workers: int) -> list:
    """Order-preserving map; results do not depend on the worker count."""
    if workers is None or workers <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


# -- row builders (top level so they pickle) ------------------------------------------

def closed_form_inverse_variance(cfg: SchemeConfig) -> float | None:
    s, r, a, eta = cfg.scheme, cfg.r, cfg.alpha, cfg.eta
    if s == "ancilla_tmsv":
        return None if eta == 0 or r == 0 else 1.0 / formulas.manc_min_variance(r, eta)
    if s == "su11_with_bs":
        return formulas.su11_qfi(r, eta)
    if s == "coherent_benchmark":
        return formulas.coherent_bound(a, eta)
    if s == "caves" and eta == 1.0:
        return formulas.caves_qfi(r, a)
    if s == "hybrid" and eta == 1.0:
        return formulas.hybrid_qfi(r, a)
    return None


def _scan_row(job: tuple[SchemeConfig, float, float]) -> list:
    cfg, phi, dphi = job
    j = qfi_fidelity(build_family(cfg), phi, dphi).value
    return [cfg.scheme, cfg.eta, j, closed_form_inverse_variance(cfg), matched_benchmark_qfi(cfg)]


def _caves_readout_info(cfg: SchemeConfig) -> float:
    M = build_m_caves(cfg.r, cfg.alpha, cfg.theta)
    try:
        return 1.0 / error_propagation(M, build_family(cfg), cfg.theta)
    except UnusableWorkingPoint:
        return 0.0


def _fig2_row(job: tuple[float, float]) -> list:
    eta, dphi = job
    r, a = FIG2_R, float(np.sinh(FIG2_R))
    cfg = SchemeConfig("caves", r=r, alpha=a, eta=eta, theta=0.0)
    j = qfi_fidelity(build_family(cfg), cfg.theta, dphi).value
    photon_counting = formulas.photon_counting_info(r, a) if eta == 1.0 else None
    return [eta, j, _caves_readout_info(cfg), photon_counting, matched_benchmark_qfi(cfg)]


def _fig4_row(job: tuple[float, float]) -> list:
    eta, dphi = job
    cfgs = fig4_configs(eta)
    vals = [qfi_fidelity(build_family(cfgs[k]), 0.0, dphi).value
            for k in ("ancilla_tmsv", "caves", "su11_with_bs", "su11_without_bs")]
    return [eta, *vals, 2.0 * eta * fig4_nbar()]


def _fig1_row(job: tuple[float, float]) -> list:
    eta, dphi = job
    cfg = SchemeConfig("ancilla_tmsv", r=FIG1_R, eta=eta)
    j = qfi_fidelity(build_family(cfg), 0.0, dphi).value
    inv = None if eta == 0 else 1.0 / formulas.manc_min_variance(FIG1_R, eta)
    return [eta, j, inv, formulas.coherent_bound(np.sinh(FIG1_R), eta)]


def _fwhm_row(r: float) -> list:
    (nbar, wn), = fwhm_scaling([r])
    return [r, nbar, wn / nbar, wn]


# -- commands -------------------------------------------------------------------------

def figure_tables(fig: str, eta_grid: np.ndarray, dphi: float, workers: int) -> dict[str, str]:
    """CSV text per file name for one figure."""
    jobs = [(float(e), dphi) for e in eta_grid]
    if fig == "fig1":
        rows = pmap(_fig1_row, jobs, workers)
        return {"fig1.csv": to_csv(["eta", "qfi_ancilla", "inv_var_manc", "coherent_benchmark"], rows)}
    if fig == "fig2":
        rows = pmap(_fig2_row, jobs, workers)
        return {"fig2.csv": to_csv(["eta", "qfi_caves", "inv_var_caves_readout",
                                    "photon_counting_lossless", "coherent_benchmark"], rows)}
    if fig == "fig4":
        rows = pmap(_fig4_row, jobs, workers)
        return {"fig4.csv": to_csv(["eta", "qfi_ancilla", "qfi_caves", "qfi_su11_with_bs",
                                    "qfi_su11_without_bs", "coherent_benchmark"], rows)}
    if fig == "figS1":
        r = 1.0
        cfg = SchemeConfig("caves", r=r, alpha=float(np.sinh(r)), theta=0.0)
        curve = fisher_vs_phi(cfg, build_m_caves(r, cfg.alpha, cfg.theta), default_phi_grid(cfg.theta))
        return {"figS1.csv": to_csv(["phi", "inv_var"], zip(curve.x, curve.values))}
    if fig == "figS2":
        rs = [float(x) for x in np.arcsinh(np.sqrt(np.linspace(1.0, 40.0, 14) / 2.0))]
        rows = pmap(_fwhm_row, rs, workers)
        return {"figS2.csv": to_csv(["r", "nbar", "fwhm", "fwhm_times_nbar"], rows)}
    raise UsageError(f"unknown figure {fig!r}; choose from {', '.join(FIGURES)}")


def cmd_scan(args) -> int:
    p = resolve(args, ["scheme", "r", "alpha", "theta", "phi", "dphi", "eta_grid", "workers"])
    grid = parse_grid(p["eta_grid"])
    if np.any(grid < 0) or np.any(grid > 1):
        raise UsageError("eta grid must lie in [0, 1]")
    if p["preset"] == "fig4":
        base = {k: v for k, v in fig4_configs(1.0).items()}
        schemes = [p["scheme"]] if p["scheme"] else list(base)
        for s in schemes:
            if s not in base:
                raise UsageError(f"scheme {s!r} is not part of fig4")
        jobs = [(SchemeConfig(s, r=base[s].r, alpha=base[s].alpha, eta=float(e)), p["phi"], p["dphi"])
                for s in schemes for e in grid]
    else:
        if not p["scheme"]:
            raise UsageError("--scheme is required without a preset")
        try:
            jobs = [(SchemeConfig(p["scheme"], r=p["r"], alpha=p["alpha"], eta=float(e), theta=p["theta"]),
                     p["phi"], p["dphi"]) for e in grid]
        except ValueError as exc:
            raise UsageError(str(exc)) from None
    rows = pmap(_scan_row, jobs, p["workers"])
    emit(to_csv(["scheme", "eta", "qfi_fidelity", "inv_var_closed_form", "coherent_benchmark"], rows),
         args.out)
    return EXIT_OK


def cmd_figure(args) -> int:
    if args.id not in FIGURES:
        raise UsageError(f"unknown figure {args.id!r}; choose from {', '.join(FIGURES)}")
    p = resolve(args, ["dphi", "eta_grid", "workers"])
    tables = figure_tables(args.id, parse_grid(p["eta_grid"]), p["dphi"], p["workers"])
    if args.out is None or args.out == "-":
        for text in tables.values():
            sys.stdout.write(text)
        return EXIT_OK
    outdir = Path(args.out)
    try:
        outdir.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise UsageError(f"cannot create {outdir}: {exc}") from None
    for name, text in tables.items():
        emit(text, str(outdir / name))
    return EXIT_OK


def cmd_sld(args) -> int:
    p = resolve(args, ["scheme", "r", "alpha", "eta", "phi"])
    if not p["scheme"]:
        raise UsageError("--scheme is required")
    try:
        cfg = SchemeConfig(p["scheme"], r=p["r"], alpha=p["alpha"], eta=p["eta"], theta=p["phi"])
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    fam = build_family(cfg)
    if not fam(p["phi"]).is_pure():
        print(f"refusing: the {cfg.scheme} state at eta={cfg.eta:g} is mixed; "
              "the SLD report needs a pure family (eta = 1)", file=sys.stderr)
        return EXIT_NUMERIC
    L = sld_pure(fam, p["phi"])
    np.set_printoptions(precision=10, suppress=True, linewidth=120)
    print(f"SLD of {cfg.scheme} at r={cfg.r:g}, alpha={cfg.alpha:g}, phi={p['phi']:g}")
    print(f"c = {fmt(L.c)}")
    print(f"l = {L.l + 0.0}")
    print(f"A =\n{L.A + 0.0}")
    print("ladder form:")
    for mono, coeff in sorted(quadratic_to_ladder(L).items()):
        label = " ".join(f"b{m}{'^dag' if d else ''}" for m, d in mono) or "1"
        print(f"  {coeff.real:+.10g}{coeff.imag:+.10g}j  {label}")
    if L.is_zero():
        print("the SLD vanishes: the family does not depend on phi")
    elif cfg.scheme == "caves":
        k, resid = fit_positive_scale(L, build_m_caves(cfg.r, cfg.alpha, p["phi"]))
        print(f"caves readout fit: scale = {fmt(k)}, residual = {resid:.3e}")
    return EXIT_OK


def cmd_oracle_check(args) -> int:
    from .crosscheck import cases, run_case

    t0 = time.perf_counter()
    results = []
    for case in cases(args.tier, cutoff=args.cutoff):
        results.extend(run_case(case, tol_scale=args.tolerance_scale))
    lines = [to_csv(["case", "quantity", "gaussian", "fock", "deviation", "tolerance", "pass"],
                    [[r.case, r.quantity, r.gaussian, r.fock, r.deviation, r.tolerance,
                      "yes" if r.passed else "no"] for r in results])]
    if args.out:
        emit(lines[0], args.out)
    else:
        sys.stdout.write(lines[0])
    for q in ("qfi", "fidelity", "mean", "variance"):
        devs = [r.deviation for r in results if r.quantity == q]
        print(f"max {q} deviation: {max(devs):.3e}", file=sys.stderr)
    failed = [r for r in results if not r.passed]
    print(f"{len(results) - len(failed)}/{len(results)} checks passed "
          f"({args.tier} tier, {time.perf_counter() - t0:.1f} s)", file=sys.stderr)
    return EXIT_OK if not failed else EXIT_NUMERIC


def cmd_fwhm(args) -> int:
    if args.r_grid:
        rs = parse_grid(args.r_grid)
    else:
        rs = np.arcsinh(np.sqrt(np.linspace(1.0, 40.0, 14) / 2.0))
    rows = pmap(_fwhm_row, [float(r) for r in rs], args.workers or 1)
    emit(to_csv(["r", "nbar", "fwhm", "fwhm_times_nbar"], rows), args.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="gaussmetro", description="Gaussian phase-estimation toolkit.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p, grid=True):
        p.add_argument("--config", help="key=value file (flags override it)")
        p.add_argument("--preset", help="parameter preset (fig1, fig2, fig4)")
        p.add_argument("--out", help="output path ('-' for stdout)")
        p.add_argument("--dphi", type=float, help="fidelity stencil step")
        p.add_argument("--workers", type=int, help="process pool size (output is unaffected)")
        if grid:
            p.add_argument("--eta-grid", dest="eta_grid", help="start:stop:step")

    p = sub.add_parser("scan", help="QFI versus transmissivity for one scheme")
    common(p)
    p.add_argument("--scheme", choices=SCHEMES)
    p.add_argument("--r", type=float)
    p.add_argument("--alpha", type=float)
    p.add_argument("--theta", type=float)
    p.add_argument("--phi", type=float)
    p.set_defaults(func=cmd_scan)

    p = sub.add_parser("figure", help="CSV bundle for one figure")
    p.add_argument("id", help=", ".join(FIGURES))
    common(p)
    p.set_defaults(func=cmd_figure)

    p = sub.add_parser("sld", help="SLD of a pure family as a quadratic observable")
    p.add_argument("--config")
    p.add_argument("--preset")
    p.add_argument("--scheme", choices=SCHEMES)
    p.add_argument("--r", type=float)
    p.add_argument("--alpha", type=float)
    p.add_argument("--eta", type=float)
    p.add_argument("--phi", type=float)
    p.set_defaults(func=cmd_sld)

    p = sub.add_parser("oracle-check", help="compare the Gaussian engine with the Fock oracle")
    p.add_argument("--tier", choices=("quick", "full"), default="quick")
    p.add_argument("--tolerance-scale", type=float, default=1.0,
                   help="multiply every tolerance (values below 1 tighten the checks)")
    p.add_argument("--cutoff", type=int, help="override the per-case Fock cutoff")
    p.add_argument("--out")
    p.set_defaults(func=cmd_oracle_check)

    p = sub.add_parser("fwhm", help="FWHM of the Caves readout information peak")
    p.add_argument("--r-grid", help="start:stop:step (default: n from 1 to 40)")
    p.add_argument("--out")
    p.add_argument("--workers", type=int)
    p.set_defaults(func=cmd_fwhm)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        print(f"gaussmetro: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (InvalidStateError, TruncationError, UnusableWorkingPoint, FloatingPointError,
            np.linalg.LinAlgError) as exc:
        print(f"gaussmetro: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
