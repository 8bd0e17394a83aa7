"""Row-sequence analysis: [n/m] for fixed m as n grows.

For each n the approximant is built, its poles extracted and tracked, and
the distance of the monic denominator to the limit polynomial measured in
the max-abs coefficient norm. A log-linear fit of those distances gives the
geometric rate delta, which is compared against

    delta = max_j |Phi(lambda_j)| / rho_m(F)

together with the companion statements: pole limits, the inverse estimate
rho_{m-1}(F) = max_j |Phi(lambda_j)|, the lower bound on rho_m(F), and the
uniform error rate on a compact set K.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .approximant import UNIQUENESS_THRESHOLD, build_approximant
from .basis import MeasureBasis
from .errors import DegenerateError, InsufficientDataError, PadeOrthoError, SizeError
from .expansion import ExpansionCoeffs, FunctionSpec, Rho0Fit, fourier_coeffs, rho0_fit

PASS, FAIL, INSUFFICIENT = "pass", "fail", "insufficient"

# Coefficient-norm distances below this sit on the roundoff plateau.
NORM_FLOOR = 1e-13
# Sup errors below this multiple of max|F| on K sit on the roundoff plateau.
SUP_ERR_REL_FLOOR = 1e-13
MAX_TRACKED = 8


@dataclass(frozen=True)
class Tolerances:
    delta_rel: float = 0.05
    pole_abs: float = 1e-4
    rho_rel: float = 0.05
    error_rate_rel: float = 0.10
    bound_slack: float = 0.05
    uniqueness: float = UNIQUENESS_THRESHOLD


def poles_of(Q) -> np.ndarray:
    """Roots of a monic polynomial given by ascending coefficients.

    Trailing zero coefficients are dropped first.

    Eigenvalues of the companion matrix; LAPACK's geev balances it first.
    """
    Q = np.asarray(Q, dtype=complex)
    # a reduced-degree denominator is stored with trailing zeros
    nz = np.flatnonzero(Q)
    Q = Q[: nz[-1] + 1] if nz.size else Q[:1]
    m = len(Q) - 1
    if m < 1:
        return np.zeros(0, dtype=complex)
    if Q[-1] != 1:
        raise ValueError("poles_of expects a monic polynomial")
    C = np.zeros((m, m), dtype=complex)
    C[1:, :-1] = np.eye(m - 1)
    C[:, -1] = -Q[:-1]
    roots = np.linalg.eigvals(C)
    order = np.lexsort((roots.imag, roots.real))
    return roots[order]


def track_poles(pole_lists) -> np.ndarray:
    """Match consecutive pole lists into trajectories.

    Returns an array of shape (len(pole_lists), m) whose column t is one
    trajectory. The first list is labelled in (real, imag) order; each
    following list is permuted to minimize the total distance to its
    predecessor, by exhaustive search over permutations.
    """
    lists = [np.asarray(p, dtype=complex) for p in pole_lists]
    if not lists:
        return np.zeros((0, 0), dtype=complex)
    m = len(lists[0])
    if m > MAX_TRACKED:
        raise SizeError(f"exhaustive tracking supports m <= {MAX_TRACKED}, got {m}")
    if any(len(p) != m for p in lists):
        raise ValueError("every pole list must have the same length")
    first = lists[0][np.lexsort((lists[0].imag, lists[0].real))]
    out = np.empty((len(lists), m), dtype=complex)
    out[0] = first
    perms = [list(p) for p in itertools.permutations(range(m))]
    for i in range(1, len(lists)):
        cur = lists[i]
        cost = np.abs(cur[:, None] - out[i - 1][None, :])
        best = min(perms, key=lambda p: (sum(cost[p[t], t] for t in range(m)), p))
        out[i] = cur[best]
    return out


def coeff_norm_diff(Qa, Qb) -> float:
    """Max-abs coefficient distance between two power-basis polynomials."""
    Qa, Qb = np.asarray(Qa, dtype=complex), np.asarray(Qb, dtype=complex)
    L = max(len(Qa), len(Qb))
    Qa = np.pad(Qa, (0, L - len(Qa)))
    Qb = np.pad(Qb, (0, L - len(Qb)))
    return float(np.max(np.abs(Qa - Qb))) if L else 0.0


@dataclass(frozen=True)
class RateFit:
    delta: float
    residual: float
    points: int
    window: tuple[int, int]


def fit_geometric_rate(series, ns=None, window=None, floor: float = 0.0) -> RateFit:
    """delta = exp(slope) of a least-squares line through log(series) vs n.

    Entries that are non-finite, non-positive, or at most ``floor`` are
    skipped. ``residual`` is the RMS deviation in log units.
    """
    y = np.asarray(series, dtype=float)
    ns = np.arange(len(y)) if ns is None else np.asarray(ns)
    lo, hi = window if window is not None else (int(ns.min()) if len(ns) else 0, int(ns.max()) if len(ns) else 0)
    use = (ns >= lo) & (ns <= hi) & np.isfinite(y) & (y > floor) & (y > 0)
    if use.sum() < 5:
        raise DegenerateError(f"only {int(use.sum())} usable points in window [{lo}, {hi}]")
    x, ly = ns[use].astype(float), np.log(y[use])
    A = np.column_stack([np.ones_like(x), x])
    coef, *_ = np.linalg.lstsq(A, ly, rcond=None)
    rms = float(np.sqrt(np.mean((ly - A @ coef) ** 2)))
    return RateFit(math.exp(coef[1]), rms, int(use.sum()), (int(lo), int(hi)))


@dataclass(frozen=True)
class ErrorCurve:
    ns: np.ndarray
    sup_err: np.ndarray
    skipped: dict
    fit: RateFit | None
    bound: float
    scale: float


def theoremA_error_curve(f: FunctionSpec, approximants, b: MeasureBasis, K, window=None,
                         rho_m: float | None = None) -> ErrorCurve:
    """Sup errors of [n/m] on the grid K and their fitted geometric rate.

    ``bound`` is max_K |Phi| / rho_m(F), with |Phi| taken as 1 on E. Grid
    points that hit a denominator zero are skipped and listed in
    ``skipped[n]``.
    """
    K = np.asarray(K, dtype=complex).ravel()
    exact = np.asarray(f(K))
    scale = float(np.max(np.abs(exact)))
    ns, errs, skipped = [], [], {}
    for a in approximants:
        vals = a.evaluate(b, K, on_pole="nan")
        bad = ~np.isfinite(vals)
        if np.any(bad):
            skipped[a.n] = K[bad].tolist()
        errs.append(float(np.max(np.abs(vals[~bad] - exact[~bad]))) if np.any(~bad) else math.nan)
        ns.append(a.n)
    ns, errs = np.array(ns), np.array(errs)
    m = approximants[0].m if approximants else 0
    if rho_m is None:
        rho_m = f.rho(b.geometry, m)
    level = float(np.max(b.geometry.level_indicator(K)))
    bound = level / rho_m
    try:
        fit = fit_geometric_rate(errs, ns, window, floor=SUP_ERR_REL_FLOOR * scale)
    except DegenerateError:
        fit = None
    return ErrorCurve(ns, errs, skipped, fit, bound, scale)


@dataclass
class RowRecord:
    n: int
    unique: bool = False
    delta_scaled: float = math.nan
    poles: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=complex))
    coeff_norm_dist: float = math.nan
    sup_err: float = math.nan
    nth_root_err: float = math.nan
    error: str | None = None


@dataclass
class RowSequenceReport:
    m: int
    ns: list
    records: list
    coeffs: ExpansionCoeffs
    trajectories: np.ndarray
    limits: np.ndarray
    limit_polynomial: np.ndarray | None
    delta_fit: RateFit | None
    delta_predicted: float | None
    rho0: Rho0Fit | None
    rho_m_minus_1: float | None
    rho_m: float | None
    error_curve: ErrorCurve | None
    window: tuple[int, int]
    error_window: tuple[int, int] | None = None
    notes: list = field(default_factory=list)

    @property
    def delta(self) -> float | None:
        return self.delta_fit.delta if self.delta_fit is not None else None

    @property
    def converged(self) -> bool:
        """True when a geometric rate in (0, 1) was detected."""
        return self.delta is not None and 0.0 < self.delta < 1.0


def _limit_points(trajectories: np.ndarray, last: int = 5) -> np.ndarray:
    if trajectories.size == 0:
        return np.zeros(0, dtype=complex)
    return trajectories[-last:].mean(axis=0)


def analyze_row(f: FunctionSpec, b: MeasureBasis, m: int, ns, K=None, N: int | None = None,
                window: tuple[int, int] | None = None, coeffs: ExpansionCoeffs | None = None,
                threshold: float = UNIQUENESS_THRESHOLD,
                error_window: tuple[int, int] | None = None) -> RowSequenceReport:
    """Build [n/m] for every n in ``ns`` and assemble the row report.

    ``window`` bounds the delta fit (default ``[n_max // 4, n_max]``);
    ``error_window`` bounds the sup-error fit on K (default: the whole
    sweep, since those errors reach roundoff early). Per-n failures are
    recorded on the row and never abort the sweep.
    """
    ns = sorted(int(n) for n in ns)
    if not ns:
        raise ValueError("empty n range")
    n_max = ns[-1]
    if coeffs is None:
        N = n_max + 2 * m + 2 if N is None else N
        coeffs = fourier_coeffs(f, b, N)
    if window is None:
        window = (max(ns[0], n_max // 4), n_max)
    g = b.geometry

    records, approximants = [], []
    for n in ns:
        rec = RowRecord(n)
        try:
            a = build_approximant(coeffs, b, n, m, threshold)
        except PadeOrthoError as exc:
            rec.error = f"{type(exc).__name__}: {exc}"
            records.append(rec)
            continue
        rec.unique, rec.delta_scaled = a.unique, a.delta_scaled
        rec.poles = poles_of(a.Q)
        records.append(rec)
        approximants.append(a)

    good = [r for r in records if r.unique and r.error is None and len(r.poles) == m]
    notes = []
    flagged = [r.n for r in records if not r.unique]
    if flagged:
        notes.append(f"non-unique rows excluded from fits: {flagged}")
    trajectories = track_poles([r.poles for r in good]) if m and good else np.zeros((0, m), dtype=complex)
    limits = _limit_points(trajectories)

    truth_poles = f.leading_poles(g, m) if m else []
    if truth_poles is not None:
        limit_poly = np.polynomial.polynomial.polyfromroots(truth_poles) if m else np.array([1.0 + 0j])
    elif len(limits) == m:
        limit_poly = np.polynomial.polynomial.polyfromroots(limits)
    else:
        limit_poly = None

    by_n = {a.n: a for a in approximants}
    if limit_poly is not None:
        for r in records:
            if r.n in by_n:
                r.coeff_norm_dist = coeff_norm_diff(by_n[r.n].Q, limit_poly)
                if r.n > 0:
                    r.nth_root_err = r.coeff_norm_dist ** (1.0 / r.n)

    delta_fit = None
    if m and limit_poly is not None:
        good_ns = {r.n for r in good}
        series = [r.coeff_norm_dist if r.n in good_ns else math.nan for r in records]
        try:
            delta_fit = fit_geometric_rate(series, [r.n for r in records], window, floor=NORM_FLOOR)
        except DegenerateError as exc:
            notes.append(f"delta fit: {exc}")
        if delta_fit is not None and delta_fit.residual > 0.5:
            notes.append(f"delta fit residual {delta_fit.residual:.3g} is large")

    delta_predicted = None
    if m and truth_poles is not None:
        rho_m_true = f.rho(g, m)
        delta_predicted = max(float(g.level_indicator(lam)) for lam in truth_poles) / rho_m_true

    try:
        rho0 = rho0_fit(coeffs)
        if rho0.residual > 0.5:
            notes.append(f"rho0 fit residual {rho0.residual:.3g} is large; slope and lim sup may differ")
    except DegenerateError as exc:
        rho0 = None
        notes.append(f"rho0: {exc}")

    rho_m_minus_1 = rho_m_est = None
    if m and len(limits) == m:
        top = max(float(g.level_indicator(lam)) for lam in limits)
        rho_m_minus_1 = top
        if delta_fit is not None and delta_fit.delta > 0:
            rho_m_est = top / delta_fit.delta

    curve = None
    if K is not None and approximants:
        curve = theoremA_error_curve(f, [by_n[r.n] for r in records if r.n in by_n], b, K, error_window)
        errs = dict(zip(curve.ns.tolist(), curve.sup_err.tolist()))
        for r in records:
            if r.n in errs:
                r.sup_err = errs[r.n]
            if r.n in curve.skipped:
                r.error = (r.error + "; " if r.error else "") + f"PoleError at {len(curve.skipped[r.n])} grid point(s)"

    return RowSequenceReport(
        m=m, ns=ns, records=records, coeffs=coeffs, trajectories=trajectories, limits=limits,
        limit_polynomial=limit_poly, delta_fit=delta_fit, delta_predicted=delta_predicted, rho0=rho0,
        rho_m_minus_1=rho_m_minus_1, rho_m=rho_m_est, error_curve=curve, window=window,
        error_window=error_window, notes=notes,
    )


def _rel_close(x: float, y: float, tol: float) -> bool:
    if math.isinf(x) or math.isinf(y):
        return x == y
    return abs(x - y) <= tol * abs(y)


def corollary1_check(report: RowSequenceReport, truth: FunctionSpec, b: MeasureBasis,
                     tol: Tolerances = Tolerances()) -> dict:
    """Verdicts on the rate identity and its companions.

    Keys: ``rate_identity``, ``pole_limits``, ``rho_m_minus_1``,
    ``theorem1_bound``; each maps to a dict with ``verdict`` and the values
    compared. For m = 0 only ``rho0`` is checked. Raises
    InsufficientDataError when the rate fit failed.
    """
    g = b.geometry
    if report.m == 0:
        return {"rho0": rho0_verdict(report, truth, b, tol)}
    if report.delta_fit is None or len(report.limits) != report.m:
        raise InsufficientDataError("no geometric rate could be fitted for this row")
    delta = report.delta_fit.delta
    out = {}
    if report.delta_predicted is None:
        out["rate_identity"] = {"verdict": INSUFFICIENT, "fitted": delta, "predicted": None}
    else:
        ok = _rel_close(delta, report.delta_predicted, tol.delta_rel)
        out["rate_identity"] = {"verdict": PASS if ok else FAIL, "fitted": delta,
                                "predicted": report.delta_predicted}

    truth_poles = truth.leading_poles(g, report.m)
    if truth_poles is None:
        out["pole_limits"] = {"verdict": INSUFFICIENT, "max_distance": None}
    else:
        cost = np.abs(np.asarray(report.limits)[:, None] - np.asarray(truth_poles)[None, :])
        dist = min(max(cost[p[t], t] for t in range(report.m))
                   for p in itertools.permutations(range(report.m)))
        out["pole_limits"] = {"verdict": PASS if dist <= tol.pole_abs else FAIL, "max_distance": float(dist)}

    rho_prev = truth.rho(g, report.m - 1)
    ok = _rel_close(report.rho_m_minus_1, rho_prev, tol.rho_rel)
    out["rho_m_minus_1"] = {"verdict": PASS if ok else FAIL, "estimate": report.rho_m_minus_1, "truth": rho_prev}

    rho_m = truth.rho(g, report.m)
    top = report.rho_m_minus_1
    lhs = rho_m * delta
    ok = lhs >= top * (1.0 - tol.bound_slack)
    out["theorem1_bound"] = {"verdict": PASS if ok else FAIL, "rho_m_times_delta": lhs, "max_level": top}
    return out


def rho0_verdict(report: RowSequenceReport, truth: FunctionSpec, b: MeasureBasis,
                 tol: Tolerances = Tolerances()) -> dict:
    true_rho0 = truth.rho(b.geometry, 0)
    if report.rho0 is None:
        return {"verdict": INSUFFICIENT, "estimate": None, "truth": true_rho0}
    ok = _rel_close(report.rho0.rho, true_rho0, tol.rho_rel)
    return {"verdict": PASS if ok else FAIL, "estimate": report.rho0.rho, "truth": true_rho0}


def theoremA_verdict(report: RowSequenceReport, tol: Tolerances = Tolerances()) -> dict:
    """Fitted sup-error rate against max_K|Phi| / rho_m(F).

    For rho_m = inf (bound 0) the errors must reach the roundoff floor
    within the sweep instead.
    """
    curve = report.error_curve
    if curve is None:
        return {"verdict": INSUFFICIENT, "fitted": None, "bound": None}
    if curve.bound == 0.0:
        finite = curve.sup_err[np.isfinite(curve.sup_err)]
        hit = finite.size and np.min(finite) <= SUP_ERR_REL_FLOOR * max(curve.scale, 1e-300) * 10
        fitted = curve.fit.delta if curve.fit is not None else None
        return {"verdict": PASS if hit else FAIL, "fitted": fitted, "bound": 0.0}
    if curve.fit is None:
        return {"verdict": INSUFFICIENT, "fitted": None, "bound": curve.bound}
    ok = curve.fit.delta <= curve.bound * (1.0 + tol.error_rate_rel)
    return {"verdict": PASS if ok else FAIL, "fitted": curve.fit.delta, "bound": curve.bound}
