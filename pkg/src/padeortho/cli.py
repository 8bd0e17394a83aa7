"""Command-line driver: config-driven row sweeps with CSV/JSON reports.

    padeortho run --config exp.yaml --out results/
    padeortho coeffs --config exp.yaml --out coeffs.txt
    padeortho check --config exp.yaml

``run`` exits 0 when every verdict passes, 2 on any failure and 3 when some
check had insufficient data. Config errors exit 1.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import platform
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import scipy

from . import __version__
from .config import ExperimentConfig, parse_config
from .errors import InsufficientDataError, PadeOrthoError, ParseError, ValidationError
from .expansion import fourier_coeffs
from .rowseq import (
    FAIL,
    INSUFFICIENT,
    PASS,
    analyze_row,
    corollary1_check,
    rho0_verdict,
    theoremA_verdict,
)

EXIT_OK, EXIT_CONFIG, EXIT_FAIL, EXIT_INSUFFICIENT = 0, 1, 2, 3


def _fmt(x) -> str:
    """Shortest round-trip text for a float; stable across runs."""
    return repr(float(x))


def _json_value(x):
    """JSON-safe scalar; infinities become the string "Entire"."""
    if x is None or isinstance(x, (bool, str)):
        return x
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, complex) or isinstance(x, np.complexfloating):
        return [_json_value(x.real), _json_value(x.imag)]
    x = float(x)
    if math.isinf(x):
        return "Entire" if x > 0 else "-inf"
    if math.isnan(x):
        return "nan"
    return x


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, np.ndarray)):
        return [_jsonable(v) for v in obj]
    return _json_value(obj)


@dataclass
class ReportBundle:
    csv_text: str
    summary: dict
    metadata: dict = field(default_factory=dict)

    @property
    def verdicts(self) -> dict:
        return {k: v["verdict"] for k, v in self.summary["checks"].items()}

    @property
    def exit_code(self) -> int:
        vs = set(self.verdicts.values())
        if FAIL in vs:
            return EXIT_FAIL
        if INSUFFICIENT in vs:
            return EXIT_INSUFFICIENT
        return EXIT_OK

    def summary_json(self) -> str:
        return json.dumps(_jsonable(self.summary), indent=2) + "\n"

    def metadata_text(self) -> str:
        lines = [f"{k}: {v}" for k, v in self.metadata.items() if k != "config"]
        lines += ["", "# config (verbatim)", self.metadata.get("config", "")]
        return "\n".join(lines).rstrip("\n") + "\n"

    def write(self, out_dir) -> Path:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        (out / "report.csv").write_text(self.csv_text)
        (out / "summary.json").write_text(self.summary_json())
        (out / "metadata.txt").write_text(self.metadata_text())
        return out


def csv_columns(m: int) -> list[str]:
    cols = ["n", "unique", "delta_scaled"]
    for j in range(1, m + 1):
        cols += [f"pole_{j}_re", f"pole_{j}_im"]
    return cols + ["coeff_norm_dist", "sup_err_K", "nth_root_err"]


def _pole_columns(report) -> dict[int, list[complex]]:
    """Poles per n in trajectory order when tracked, else as computed."""
    by_n = {}
    tracked = [r for r in report.records if r.unique and r.error is None and len(r.poles) == report.m]
    for r, row in zip(tracked, report.trajectories):
        by_n[r.n] = list(row)
    for r in report.records:
        if r.n not in by_n and len(r.poles) == report.m:
            by_n[r.n] = list(r.poles)
    return by_n


def _csv_text(report) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(csv_columns(report.m))
    poles = _pole_columns(report)
    nan = math.nan
    for r in report.records:
        row = [r.n, "true" if r.unique else "false", _fmt(r.delta_scaled)]
        for lam in poles.get(r.n, [complex(nan, nan)] * report.m):
            row += [_fmt(lam.real), _fmt(lam.imag)]
        row += [_fmt(r.coeff_norm_dist), _fmt(r.sup_err), _fmt(r.nth_root_err)]
        w.writerow(row)
    return buf.getvalue()


def _checks(cfg: ExperimentConfig, report) -> dict:
    b, tol = cfg.basis, cfg.tolerances
    checks = {}
    if cfg.m:
        try:
            checks.update(corollary1_check(report, cfg.function, b, tol))
        except InsufficientDataError as exc:
            for key in ("rate_identity", "pole_limits", "rho_m_minus_1", "theorem1_bound"):
                checks[key] = {"verdict": INSUFFICIENT, "reason": str(exc)}
    checks["rho0"] = rho0_verdict(report, cfg.function, b, tol)
    if cfg.grid is not None:
        checks["error_rate"] = theoremA_verdict(report, tol)
    return checks


def run_experiment(cfg: ExperimentConfig) -> ReportBundle:
    """Run the configured row sweep and assemble the report."""
    t0 = time.perf_counter()
    b = cfg.basis
    coeffs = fourier_coeffs(cfg.function, b, cfg.N)
    t1 = time.perf_counter()
    K = cfg.grid.build(cfg.geometry) if cfg.grid is not None else None
    report = analyze_row(
        cfg.function, b, cfg.m, cfg.ns, K=K, window=cfg.fit_window, coeffs=coeffs,
        threshold=cfg.tolerances.uniqueness, error_window=cfg.error_window,
    )
    t2 = time.perf_counter()

    checks = _checks(cfg, report)
    verdicts = {k: v["verdict"] for k, v in checks.items()}
    if FAIL in verdicts.values():
        overall = FAIL
    elif INSUFFICIENT in verdicts.values():
        overall = INSUFFICIENT
    else:
        overall = PASS

    g = cfg.geometry
    curve = report.error_curve
    summary = {
        "verdict": overall,
        "m": cfg.m,
        "n_range": [cfg.n_start, cfg.n_stop, cfg.n_step],
        "truncation": cfg.N,
        "rows": len(report.records),
        "non_unique_rows": [r.n for r in report.records if not r.unique],
        "row_errors": {str(r.n): r.error for r in report.records if r.error},
        "delta_fitted": report.delta,
        "delta_fit_residual": report.delta_fit.residual if report.delta_fit else None,
        "delta_fit_points": report.delta_fit.points if report.delta_fit else None,
        "delta_fit_window": list(report.window) if cfg.m else None,
        "delta_predicted": report.delta_predicted,
        "pole_limits": [complex(z) for z in report.limits],
        "rho0_estimate": report.rho0.rho if report.rho0 else None,
        "rho0_true": cfg.function.rho(g, 0),
        "rho_m_minus_1_estimate": report.rho_m_minus_1,
        "rho_m_estimate": report.rho_m,
        "rho_m_true": cfg.function.rho(g, cfg.m),
        "error_rate_fitted": curve.fit.delta if curve is not None and curve.fit is not None else None,
        "error_rate_bound": curve.bound if curve is not None else None,
        "checks": checks,
        "notes": list(report.notes),
    }
    if not cfg.m:
        for key in ("delta_fitted", "delta_fit_residual", "delta_fit_points", "delta_predicted"):
            summary.pop(key)
    metadata = {
        "padeortho": __version__,
        "python": platform.python_version(),
        "numpy": np.__version__,
        "scipy": scipy.__version__,
        "platform": platform.platform(),
        "coefficients_seconds": f"{t1 - t0:.4f}",
        "sweep_seconds": f"{t2 - t1:.4f}",
        "config": cfg.source if cfg.source is not None else cfg.dump(),
    }
    return ReportBundle(_csv_text(report), summary, metadata)


def _cmd_run(args) -> int:
    cfg = parse_config(Path(args.config))
    out = args.out or cfg.output_dir
    if out is None:
        raise ValidationError("no output directory: pass --out or set output.dir")
    bundle = run_experiment(cfg)
    bundle.write(out)
    for name, v in bundle.verdicts.items():
        print(f"{name}: {v}")
    print(f"overall: {bundle.summary['verdict']}")
    return bundle.exit_code


def _cmd_coeffs(args) -> int:
    cfg = parse_config(Path(args.config))
    out = args.out or cfg.coeffs_path
    if out is None:
        raise ValidationError("no output file: pass --out or set output.coeffs")
    c = fourier_coeffs(cfg.function, cfg.basis, cfg.N)
    Path(out).write_text(c.to_text())
    return EXIT_OK


def _cmd_check(args) -> int:
    cfg = parse_config(Path(args.config))
    print(f"ok: m={cfg.m}, n={cfg.n_start}..{cfg.n_stop} step {cfg.n_step}, N={cfg.N}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="padeortho", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)
    run = sub.add_parser("run", help="run a row sweep and write report.csv, summary.json, metadata.txt")
    run.add_argument("--config", required=True)
    run.add_argument("--out", help="output directory (default: output.dir from the config)")
    run.set_defaults(func=_cmd_run)
    co = sub.add_parser("coeffs", help="dump the expansion coefficients as 'n re im' lines")
    co.add_argument("--config", required=True)
    co.add_argument("--out", help="output file (default: output.coeffs from the config)")
    co.set_defaults(func=_cmd_coeffs)
    ch = sub.add_parser("check", help="validate a config without running it")
    ch.add_argument("--config", required=True)
    ch.set_defaults(func=_cmd_check)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ParseError, ValidationError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except PadeOrthoError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
