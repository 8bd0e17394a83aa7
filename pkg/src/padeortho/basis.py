"""Orthonormal polynomial bases for the supported measures.

Interval families are stored through their orthonormal three-term recurrence

    x p_k = b_{k+1} p_{k+1} + a_k p_k + b_k p_{k-1},

scaled from the reference interval [-1, 1] to [a, b] by the affine map
``x = c + h t``. The pushed-forward measure keeps its total mass, so
``p_k(x) = p_k^ref(t)``, ``a_k = c + h a_k^ref`` and ``b_k = h b_k^ref``.

The circle family is normalized Lebesgue measure ``dtheta / 2pi`` on
``|z| = 1``, whose orthonormal polynomials are the monomials.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable

import numpy as np
from scipy.special import roots_legendre

from .errors import ConvergenceError, DomainError, TruncationError
from .geometry import Geometry, GeometryKind


class Family(str, enum.Enum):
    CIRCLE_LEBESGUE = "circle"
    CHEBYSHEV_FIRST_KIND = "chebyshev1"
    CHEBYSHEV_SECOND_KIND = "chebyshev2"
    LEGENDRE = "legendre"


_REFERENCE_MASS = {
    Family.CIRCLE_LEBESGUE: 1.0,
    Family.CHEBYSHEV_FIRST_KIND: math.pi,
    Family.CHEBYSHEV_SECOND_KIND: math.pi / 2,
    Family.LEGENDRE: 2.0,
}


@lru_cache(maxsize=64)
def _reference_b(family: Family, n: int) -> np.ndarray:
    """Off-diagonal recurrence coefficients b_0..b_n on [-1, 1]; b_0 = 0."""
    k = np.arange(n + 1, dtype=float)
    if family is Family.CHEBYSHEV_FIRST_KIND:
        b = np.full(n + 1, 0.5)
        if n >= 1:
            b[1] = math.sqrt(0.5)
    elif family is Family.CHEBYSHEV_SECOND_KIND:
        b = np.full(n + 1, 0.5)
    elif family is Family.LEGENDRE:
        with np.errstate(divide="ignore", invalid="ignore"):
            b = k / np.sqrt(4.0 * k * k - 1.0)
    else:
        raise ValueError(f"{family} has no three-term recurrence")
    b[0] = 0.0
    b.setflags(write=False)
    return b


@lru_cache(maxsize=64)
def _reference_rule(family: Family, n: int) -> tuple[np.ndarray, np.ndarray]:
    """n-point Gauss rule for the reference measure (trapezoid for the circle)."""
    if family is Family.CIRCLE_LEBESGUE:
        theta = 2.0 * np.pi * np.arange(n) / n
        return np.exp(1j * theta), np.full(n, 1.0 / n)
    if family is Family.CHEBYSHEV_FIRST_KIND:
        t = np.cos((2.0 * np.arange(1, n + 1) - 1.0) * np.pi / (2.0 * n))
        return t, np.full(n, np.pi / n)
    if family is Family.CHEBYSHEV_SECOND_KIND:
        theta = np.arange(1, n + 1) * np.pi / (n + 1)
        return np.cos(theta), np.pi / (n + 1) * np.sin(theta) ** 2
    t, w = roots_legendre(n)
    return t, w


@dataclass(frozen=True)
class CoefficientVector:
    """Coordinates ``c_0..c_N`` of a function in the p_k basis.

    ``complete`` marks a finite expansion (a polynomial): every coordinate
    beyond ``N`` is known to be zero, so operators may pad instead of
    truncating.
    """

    entries: np.ndarray
    complete: bool = False

    def __post_init__(self):
        e = np.array(self.entries, dtype=complex).ravel()
        if not np.all(np.isfinite(e)):
            raise ValueError("coefficient entries must be finite")
        e.setflags(write=False)
        object.__setattr__(self, "entries", e)

    def __len__(self):
        return len(self.entries)

    @property
    def N(self) -> int:
        return len(self.entries) - 1


@dataclass(frozen=True)
class MeasureBasis:
    """Orthonormal polynomials of a supported measure on a supported set."""

    geometry: Geometry
    family: Family
    quad_start: int = 32
    quad_cap: int = 2 ** 16
    quad_rtol: float = 1e-12
    _mass: float = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "family", Family(self.family))
        circle_family = self.family is Family.CIRCLE_LEBESGUE
        disk = self.geometry.kind is GeometryKind.UNIT_DISK
        if circle_family != disk:
            raise ValueError(f"family {self.family.value} does not live on {self.geometry.kind.value}")
        object.__setattr__(self, "_mass", _REFERENCE_MASS[self.family])

    @classmethod
    def circle(cls) -> "MeasureBasis":
        return cls(Geometry.unit_disk(), Family.CIRCLE_LEBESGUE)

    @classmethod
    def chebyshev1(cls, a=-1.0, b=1.0) -> "MeasureBasis":
        return cls(Geometry.interval(a, b), Family.CHEBYSHEV_FIRST_KIND)

    @classmethod
    def chebyshev2(cls, a=-1.0, b=1.0) -> "MeasureBasis":
        return cls(Geometry.interval(a, b), Family.CHEBYSHEV_SECOND_KIND)

    @classmethod
    def legendre(cls, a=-1.0, b=1.0) -> "MeasureBasis":
        return cls(Geometry.interval(a, b), Family.LEGENDRE)

    @property
    def is_circle(self) -> bool:
        return self.family is Family.CIRCLE_LEBESGUE

    @property
    def mass(self) -> float:
        return self._mass

    @property
    def bandwidth(self) -> int:
        """Extra input coefficients consumed per multiplication by z."""
        return 0 if self.is_circle else 1

    # -- recurrence ---------------------------------------------------------

    def recurrence(self, n: int) -> tuple[np.ndarray, np.ndarray]:
        """Arrays ``a_0..a_n`` and ``b_0..b_{n+1}`` (with ``b_0 = 0``)."""
        if self.is_circle:
            raise ValueError("the circle basis has no real three-term recurrence")
        h = self.geometry.half_width
        a = np.full(n + 1, self.geometry.center)
        b = h * _reference_b(self.family, n + 1)
        return a, b

    def leading_coeff(self, k: int) -> float:
        """kappa_k, the positive leading coefficient of p_k."""
        if k < 0:
            raise ValueError("degree must be nonnegative")
        if self.is_circle:
            return 1.0
        kappa = 1.0 / math.sqrt(self.mass)
        _, b = self.recurrence(k)
        for i in range(1, k + 1):
            kappa /= b[i]
        return kappa

    def eval_all(self, kmax: int, z):
        """Values p_0(z)..p_kmax(z), stacked along a new leading axis."""
        z = np.asarray(z, dtype=complex)
        out = np.empty((kmax + 1,) + z.shape, dtype=complex)
        if self.is_circle:
            out[0] = 1.0
            for k in range(1, kmax + 1):
                out[k] = out[k - 1] * z
            return out
        a, b = self.recurrence(kmax)
        out[0] = 1.0 / math.sqrt(self.mass)
        if kmax >= 1:
            out[1] = (z - a[0]) * out[0] / b[1]
        for k in range(1, kmax):
            out[k + 1] = ((z - a[k]) * out[k] - b[k] * out[k - 1]) / b[k + 1]
        return out

    def eval_p(self, k: int, z):
        """p_k(z) by forward recurrence (interval) or z**k (circle)."""
        if k < 0:
            raise ValueError("degree must be nonnegative")
        if self.is_circle and not isinstance(z, np.ndarray):
            return z ** k
        vals = self.eval_all(k, z)[k]
        return vals.item() if vals.ndim == 0 else vals

    # -- quadrature ---------------------------------------------------------

    def rule(self, n: int) -> tuple[np.ndarray, np.ndarray]:
        """n-point rule (nodes, weights) for the measure on E's support."""
        t, w = _reference_rule(self.family, n)
        if self.is_circle:
            return t, w
        return self.geometry.center + self.geometry.half_width * t, w

    def quadrature_inner(self, g: Callable, h: Callable) -> complex:
        """<g, h> = integral of g * conj(h) d mu, with node doubling.

        ``g`` and ``h`` are called with a numpy array of nodes. Refinement
        stops when successive estimates differ by at most ``quad_rtol`` times
        the integral of ``|g h|``.
        """
        n = self.quad_start
        prev = None
        while n <= self.quad_cap:
            x, w = self.rule(n)
            prod = np.asarray(g(x), dtype=complex) * np.conj(np.asarray(h(x), dtype=complex))
            value = np.sum(w * prod)
            scale = np.sum(w * np.abs(prod))
            if prev is not None and abs(value - prev) <= self.quad_rtol * max(scale, abs(value)):
                return complex(value)
            prev = value
            n *= 2
        raise ConvergenceError(f"quadrature did not stabilize within {self.quad_cap} nodes")

    # -- second-type functions ---------------------------------------------

    def _check_outside(self, z):
        if np.any(self.geometry.contains(z)):
            raise DomainError("second-type functions are evaluated outside E")

    def _reference_s0(self, u):
        root = np.sqrt(u - 1.0) * np.sqrt(u + 1.0)
        if self.family is Family.CHEBYSHEV_FIRST_KIND:
            return math.sqrt(math.pi) / root
        if self.family is Family.CHEBYSHEV_SECOND_KIND:
            # pi (u - root) written without cancellation
            return math.sqrt(2.0 * math.pi) / (u + root)
        return math.sqrt(2.0) * np.arctanh(1.0 / u)

    def second_type_all(self, kmax: int, z, method: str = "recurrence"):
        """s_0(z)..s_kmax(z), stacked along a new leading axis.

        ``method="recurrence"`` takes the closed-form Stieltjes transform for
        s_0 and builds the minimal solution of the three-term recurrence from
        backward ratios. ``method="quadrature"`` integrates each s_k directly;
        it loses relative accuracy once s_k falls below the quadrature noise.
        """
        self._check_outside(z)
        z = np.asarray(z, dtype=complex)
        if self.is_circle:
            inv = 1.0 / z
            out = np.empty((kmax + 1,) + z.shape, dtype=complex)
            out[0] = inv
            for k in range(1, kmax + 1):
                out[k] = out[k - 1] * inv
            return out
        if method == "quadrature":
            out = np.empty((kmax + 1,) + z.shape, dtype=complex)
            for idx in np.ndindex(z.shape):
                zi = z[idx]
                for k in range(kmax + 1):
                    out[(k,) + idx] = self.quadrature_inner(
                        lambda x, zi=zi: 1.0 / (zi - x), lambda x, k=k: self.eval_p(k, x)
                    )
            return out
        if method != "recurrence":
            raise ValueError(f"unknown method {method!r}")
        h = self.geometry.half_width
        u = self.geometry.pullback(z)
        ratios = _minimal_ratios(self.family, kmax, u)
        out = np.empty((kmax + 1,) + z.shape, dtype=complex)
        out[0] = self._reference_s0(u) / h
        for k in range(1, kmax + 1):
            out[k] = out[k - 1] * ratios[k]
        return out

    def second_type_fn(self, k: int, z, method: str = "recurrence"):
        """s_k(z) = integral of conj(p_k(t)) / (z - t) d mu(t), z outside E."""
        if k < 0:
            raise ValueError("degree must be nonnegative")
        if self.is_circle and not isinstance(z, np.ndarray):
            self._check_outside(complex(z))
            return z ** (-k - 1)
        vals = self.second_type_all(k, z, method=method)[k]
        return vals.item() if vals.ndim == 0 else vals

    # -- multiplication operator -------------------------------------------

    def apply_multiplication(self, c: CoefficientVector, j: int, length: int | None = None) -> CoefficientVector:
        """Coordinates of z**j * f where f has coordinates ``c``.

        Each multiplication by z costs ``bandwidth`` trailing entries of an
        incomplete vector; a complete vector grows by one instead.
        """
        if j < 0:
            raise ValueError("power must be nonnegative")
        if not isinstance(c, CoefficientVector):
            c = CoefficientVector(c)
        if c.complete:
            exact = len(c) + j
        else:
            exact = len(c) - j * self.bandwidth
        if length is None:
            length = max(exact, 0)
        if length > exact:
            raise TruncationError(
                f"need {length} exact entries of z^{j} f but only {max(exact, 0)} are available"
            )
        cur = np.array(c.entries, dtype=complex)
        if c.complete:
            cur = np.concatenate([cur, np.zeros(j, dtype=complex)])
        for _ in range(j):
            cur = self._times_z(cur)
        if not c.complete:
            cur = cur[: len(cur) - j * self.bandwidth] if self.bandwidth else cur
        return CoefficientVector(cur[:length], complete=c.complete)

    def _times_z(self, c: np.ndarray) -> np.ndarray:
        """One application of z on a coordinate array of the same length.

        For the interval the last entry is wrong (it misses c_{N+1}); callers
        discard it.
        """
        out = np.zeros_like(c)
        if self.is_circle:
            out[1:] = c[:-1]
            return out
        n = len(c) - 1
        a, b = self.recurrence(n)
        out += a[: n + 1] * c
        out[1:] += b[1 : n + 1] * c[:-1]
        out[:-1] += b[1 : n + 1] * c[1:]
        return out

    def constant_one(self) -> CoefficientVector:
        """Coordinates of the constant function 1."""
        return CoefficientVector([math.sqrt(self.mass)], complete=True)


def _minimal_ratios(family: Family, kmax: int, u):
    """Ratios s_k/s_{k-1} (k = 1..kmax) of the minimal recurrence solution.

    Backward recurrence r_k = b_k / (u - b_{k+1} r_{k+1}) started from
    r_{N+1} = 0; N is doubled until r_1..r_kmax settle to machine precision.
    """
    u = np.asarray(u, dtype=complex)
    if kmax == 0:
        return np.ones((1,) + u.shape, dtype=complex)
    tail = max(kmax, 64)
    prev = None
    while tail <= 2 ** 22:
        n_top = kmax + tail
        b = _reference_b(family, n_top + 1)
        r = np.zeros(u.shape, dtype=complex)
        ratios = np.empty((kmax + 1,) + u.shape, dtype=complex)
        for k in range(n_top, 0, -1):
            r = b[k] / (u - b[k + 1] * r)
            if k <= kmax:
                ratios[k] = r
        ratios[0] = 1.0
        if prev is not None:
            change = np.max(np.abs(ratios[1:] - prev[1:]) / np.abs(ratios[1:]))
            if change <= 4 * np.finfo(float).eps:
                return ratios
        prev = ratios
        tail *= 2
    raise ConvergenceError("backward recurrence for second-type functions did not settle")


def eval_p(b: MeasureBasis, k: int, z):
    return b.eval_p(k, z)


def leading_coeff(b: MeasureBasis, k: int) -> float:
    return b.leading_coeff(k)


def second_type_fn(b: MeasureBasis, k: int, z, method: str = "recurrence"):
    return b.second_type_fn(k, z, method=method)


def apply_multiplication(b: MeasureBasis, c: CoefficientVector, j: int, length: int | None = None):
    return b.apply_multiplication(c, j, length)


def quadrature_inner(b: MeasureBasis, g: Callable, h: Callable) -> complex:
    return b.quadrature_inner(g, h)
