"""Target functions and their Fourier coefficients F_n = <F, p_n>.

A :class:`FunctionSpec` is a finite sum of pole terms ``c / (z - lam)**k``
plus an optional entire part (``exp`` or a polynomial). Coefficients are
produced in closed form wherever possible:

* pole terms reduce to second-type functions, ``<1/(z - lam), p_n> = -s_n(lam)``,
  and higher orders to derivatives of s_n in ``lam``;
* polynomials are expanded exactly with the multiplication operator;
* ``exp`` uses modified Bessel function identities.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import ive, spherical_in

from .basis import CoefficientVector, Family, MeasureBasis
from .errors import DegenerateError, DomainError
from .geometry import Geometry, GeometryKind

#: Returned by :func:`rho0_estimate` for entire functions.
ENTIRE = math.inf

# Entire when the linear fit gives a radius beyond this.
ENTIRE_RHO = 1e6


class EntireKind(str, enum.Enum):
    NONE = "none"
    EXP = "exp"
    POLYNOMIAL = "polynomial"


@dataclass(frozen=True)
class Pole:
    """Principal part ``sum_k coefficients[k-1] / (z - location)**k``."""

    location: complex
    order: int
    coefficients: tuple

    def __post_init__(self):
        coeffs = tuple(complex(c) for c in self.coefficients)
        if self.order < 1 or len(coeffs) != self.order:
            raise ValueError(f"pole of order {self.order} needs {self.order} coefficients, got {len(coeffs)}")
        if coeffs[-1] == 0:
            raise ValueError("leading principal-part coefficient must be nonzero")
        object.__setattr__(self, "location", complex(self.location))
        object.__setattr__(self, "coefficients", coeffs)

    @classmethod
    def simple(cls, location, residue=1.0) -> "Pole":
        return cls(location, 1, (residue,))


@dataclass(frozen=True)
class Singularity:
    """Declared ground-truth singularity. ``order=None`` marks a non-polar one."""

    location: complex
    level: float | None = None
    order: int | None = None


@dataclass(frozen=True)
class FunctionSpec:
    poles: tuple = ()
    entire: EntireKind = EntireKind.NONE
    polynomial: tuple = ()
    declared_singularities: tuple | None = None

    def __post_init__(self):
        object.__setattr__(self, "poles", tuple(self.poles))
        object.__setattr__(self, "entire", EntireKind(self.entire))
        object.__setattr__(self, "polynomial", tuple(complex(c) for c in self.polynomial))
        if self.entire is not EntireKind.POLYNOMIAL and self.polynomial:
            raise ValueError("polynomial coefficients given without entire='polynomial'")
        if self.declared_singularities is not None:
            object.__setattr__(self, "declared_singularities", tuple(self.declared_singularities))

    @classmethod
    def inverse_sum(cls, *locations, entire=EntireKind.NONE, polynomial=()) -> "FunctionSpec":
        """F(z) = sum 1 / (lam - z), the usual test family."""
        return cls(tuple(Pole.simple(lam, -1.0) for lam in locations), entire, polynomial)

    def scaled(self, factor) -> "FunctionSpec":
        """The function ``factor * F``."""
        poles = tuple(Pole(p.location, p.order, tuple(factor * c for c in p.coefficients)) for p in self.poles)
        entire, poly = self.entire, tuple(factor * c for c in self.polynomial)
        if self.entire is EntireKind.EXP and factor != 1:
            raise ValueError("scaling an exp entire part is not representable")
        return FunctionSpec(poles, entire, poly, self.declared_singularities)

    @property
    def total_multiplicity(self) -> int:
        return sum(p.order for p in self.poles)

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        out = np.zeros_like(z)
        for p in self.poles:
            d = z - p.location
            for k, c in enumerate(p.coefficients, start=1):
                out = out + c / d ** k
        if self.entire is EntireKind.EXP:
            out = out + np.exp(z)
        elif self.entire is EntireKind.POLYNOMIAL:
            out = out + np.polynomial.polynomial.polyval(z, np.array(self.polynomial))
        return out.item() if out.ndim == 0 else out

    def check_outside(self, geometry: Geometry):
        for p in self.poles:
            if geometry.contains(p.location):
                raise DomainError(f"pole at {p.location} lies in E")

    # -- ground truth -----------------------------------------------------

    def singularity_levels(self, geometry: Geometry) -> tuple[list[tuple[float, complex]], float]:
        """Pole levels repeated by multiplicity, and the first non-polar level.

        Declared singularities take precedence over the pole list when given.
        """
        polar, barrier = [], math.inf
        if self.declared_singularities is not None:
            for s in self.declared_singularities:
                level = s.level if s.level is not None else float(geometry.level_indicator(s.location))
                if s.order is None:
                    barrier = min(barrier, level)
                else:
                    polar.extend([(level, complex(s.location))] * s.order)
        else:
            for p in self.poles:
                level = float(geometry.level_indicator(p.location))
                polar.extend([(level, p.location)] * p.order)
        polar.sort(key=lambda t: (t[0], t[1].real, t[1].imag))
        return polar, barrier

    def rho(self, geometry: Geometry, m: int) -> float:
        """rho_m(F): the largest canonical index with at most m poles inside."""
        polar, barrier = self.singularity_levels(geometry)
        levels = [lv for lv, _ in polar if lv < barrier]
        return levels[m] if m < len(levels) else barrier

    def leading_poles(self, geometry: Geometry, m: int) -> list[complex] | None:
        """The m poles inside D_{rho_m}, or None if F has fewer than m there."""
        polar, _ = self.singularity_levels(geometry)
        rho_m = self.rho(geometry, m)
        inside = [lam for lv, lam in polar if lv < rho_m]
        return inside if len(inside) == m else None


@dataclass(frozen=True)
class ExpansionCoeffs(CoefficientVector):
    """Fourier coefficients F_0..F_N of a function in a given basis."""

    basis: MeasureBasis | None = field(default=None, compare=False)

    def to_text(self) -> str:
        lines = [f"{n} {float(v.real)!r} {float(v.imag)!r}" for n, v in enumerate(self.entries)]
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str, basis: MeasureBasis | None = None) -> "ExpansionCoeffs":
        rows = {}
        for lineno, line in enumerate(text.splitlines(), start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split()
            if len(parts) != 3:
                raise ValueError(f"line {lineno}: expected 'n re im', got {line!r}")
            n = int(parts[0])
            if n in rows:
                raise ValueError(f"line {lineno}: duplicate index {n}")
            rows[n] = complex(float(parts[1]), float(parts[2]))
        if sorted(rows) != list(range(len(rows))):
            raise ValueError("indices must run contiguously from 0")
        return cls([rows[n] for n in range(len(rows))], basis=basis)


def _exp_coeffs(b: MeasureBasis, N: int) -> np.ndarray:
    n = np.arange(N + 1)
    if b.is_circle:
        return np.exp(-np.array([math.lgamma(k + 1) for k in n]))
    c, h = b.geometry.center, b.geometry.half_width
    # exp(x) = e^c exp(h t); ive(v, h) = iv(v, h) e^{-h}
    scale = math.exp(c + h)
    if b.family is Family.CHEBYSHEV_FIRST_KIND:
        out = math.sqrt(2 * math.pi) * ive(n, h)
        out[0] = math.sqrt(math.pi) * ive(0, h)
    elif b.family is Family.CHEBYSHEV_SECOND_KIND:
        out = math.sqrt(2 * math.pi) * (n + 1) * ive(n + 1, h) / h
    else:
        return math.exp(c) * np.sqrt(2.0 * (2 * n + 1)) * spherical_in(n, h)
    return scale * out


def _polynomial_coeffs(b: MeasureBasis, poly, N: int) -> CoefficientVector:
    out = np.zeros(max(N + 1, len(poly)), dtype=complex)
    one = b.constant_one()
    for j, a in enumerate(poly):
        if a != 0:
            out[: j + 1] += a * b.apply_multiplication(one, j).entries
    return out[: N + 1]


def _pole_coeffs(b: MeasureBasis, pole: Pole, N: int) -> np.ndarray:
    lam = pole.location
    n = np.arange(N + 1)
    out = np.zeros(N + 1, dtype=complex)
    if b.is_circle:
        # Taylor coefficients of (z - lam)^-k
        for k, c in enumerate(pole.coefficients, start=1):
            binom = np.array([math.comb(int(i) + k - 1, k - 1) for i in n], dtype=float)
            out += c * (-1) ** k * binom * lam ** (-n.astype(float) - k)
        return out
    s = b.second_type_all(N, lam)
    out += -pole.coefficients[0] * s
    if pole.order > 1:
        derivs = _second_type_derivatives(b, N, lam, pole.order - 1)
        for k in range(2, pole.order + 1):
            out += -pole.coefficients[k - 1] / math.factorial(k - 1) * derivs[k - 1]
    return out


def _second_type_derivatives(b: MeasureBasis, N: int, lam: complex, jmax: int, points: int = 64):
    """d^j/dz^j s_n(z) at lam for j = 0..jmax by the Cauchy integral formula.

    The contour radius keeps |Phi| nearly constant across the circle so that
    s_n does not vary by more than a modest factor for n <= N.
    """
    g = b.geometry
    if g.kind is GeometryKind.INTERVAL:
        x = min(max(lam.real, g.a), g.b)
        dist = abs(lam - x)
    else:
        dist = abs(lam) - 1.0
    log_rate = abs(g.phi_prime(lam) / g.phi(lam))
    r = min(0.5 * dist, 1.0 / (max(N, 1) * log_rate))
    theta = 2.0 * np.pi * np.arange(points) / points
    zeta = lam + r * np.exp(1j * theta)
    vals = b.second_type_all(N, zeta)
    out = np.empty((jmax + 1, N + 1), dtype=complex)
    for j in range(jmax + 1):
        out[j] = math.factorial(j) / r ** j * np.mean(vals * np.exp(-1j * j * theta), axis=1)
    return out


def fourier_coeffs(f: FunctionSpec, b: MeasureBasis, N: int) -> ExpansionCoeffs:
    """F_0..F_N with F_n = <F, p_n>_mu."""
    if N < 0:
        raise ValueError("truncation order must be nonnegative")
    f.check_outside(b.geometry)
    out = np.zeros(N + 1, dtype=complex)
    for pole in f.poles:
        out += _pole_coeffs(b, pole, N)
    if f.entire is EntireKind.EXP:
        out += _exp_coeffs(b, N)
    elif f.entire is EntireKind.POLYNOMIAL:
        out += _polynomial_coeffs(b, f.polynomial, N)
    complete = not f.poles and f.entire is not EntireKind.EXP and N + 1 >= len(f.polynomial)
    return ExpansionCoeffs(out, complete=complete, basis=b)


def partial_sum(c: CoefficientVector, b: MeasureBasis, z, n: int | None = None):
    """sum_{k <= n} c_k p_k(z)."""
    n = c.N if n is None else n
    vals = b.eval_all(n, z)
    coeffs = np.asarray(c.entries[: n + 1]).reshape((-1,) + (1,) * (vals.ndim - 1))
    out = np.sum(coeffs * vals, axis=0)
    return out.item() if out.ndim == 0 else out


@dataclass(frozen=True)
class Rho0Fit:
    rho: float
    residual: float
    points: int
    superlinear: bool

    @property
    def entire(self) -> bool:
        return math.isinf(self.rho)


def rho0_fit(c: CoefficientVector, window: tuple[int, int] | None = None) -> Rho0Fit:
    """Fit the exponential decay of |F_n| over an inclusive index window.

    Zero entries are skipped. The result is reported as entire when the
    window ends in a run of zeros covering at least half of it, when the
    fitted radius exceeds ``ENTIRE_RHO``, or when the decay is clearly
    superlinear (log|F_n| bends like -n log n).
    """
    vals = np.abs(np.asarray(c.entries))
    N = len(vals) - 1
    lo, hi = window if window is not None else (N // 2, N)
    if not (0 <= lo <= hi <= N) or hi - lo + 1 < 5:
        raise ValueError(f"window [{lo}, {hi}] must lie in [0, {N}] and hold at least 5 indices")
    n = np.arange(lo, hi + 1)
    y = vals[lo : hi + 1]
    nz = y > 0
    if not np.any(nz):
        if np.any(vals[:lo] > 0):
            return Rho0Fit(ENTIRE, 0.0, 0, False)
        raise DegenerateError("all coefficients in the window are zero")
    trailing = len(y) - 1 - np.flatnonzero(nz)[-1]
    if 2 * trailing >= len(y):
        return Rho0Fit(ENTIRE, 0.0, int(nz.sum()), False)
    if nz.sum() < 5:
        raise DegenerateError(f"only {int(nz.sum())} nonzero coefficients in the window")
    x, ly = n[nz].astype(float), np.log(y[nz])
    A = np.column_stack([np.ones_like(x), x])
    coef, *_ = np.linalg.lstsq(A, ly, rcond=None)
    resid = ly - A @ coef
    rms = float(np.sqrt(np.mean(resid ** 2)))
    superlinear = False
    if len(x) >= 6:
        B = np.column_stack([A, x * np.log(x + 1.0)])
        coef2, *_ = np.linalg.lstsq(B, ly, rcond=None)
        rms2 = float(np.sqrt(np.mean((ly - B @ coef2) ** 2)))
        superlinear = bool(coef2[2] < -0.5 and rms2 <= 0.5 * rms)
    rho = math.exp(-coef[1])
    if superlinear or rho > ENTIRE_RHO:
        rho = ENTIRE
    return Rho0Fit(rho, rms, int(nz.sum()), superlinear)


def rho0_estimate(c: CoefficientVector, window: tuple[int, int] | None = None) -> float:
    """Radius rho_0(F) from the coefficient decay; ``ENTIRE`` (inf) for entire F."""
    return rho0_fit(c, window).rho
