"""Exterior conformal maps for the supported compact sets.

Two kinds of set E are supported, both with closed-form exterior maps:

* the closed unit disk, where ``phi`` is the identity, and
* a real interval ``[a, b]``, where ``phi`` is the inverse Joukowski map
  applied after the affine pullback ``u = (2z - a - b) / (b - a)``.

All functions accept scalars or numpy arrays. Scalars come back as Python
``complex`` (or ``float`` for real-valued quantities).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .errors import DomainError


class GeometryKind(str, enum.Enum):
    UNIT_DISK = "unit_disk"
    INTERVAL = "interval"


def _unwrap(x):
    x = np.asarray(x)
    return x.item() if x.ndim == 0 else x


@dataclass(frozen=True)
class Geometry:
    """A compact set E together with its exterior conformal map.

    Use :meth:`unit_disk` or :meth:`interval` rather than the raw constructor.
    """

    kind: GeometryKind
    a: float = -1.0
    b: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "kind", GeometryKind(self.kind))
        if self.kind is GeometryKind.INTERVAL:
            if not (np.isfinite(self.a) and np.isfinite(self.b) and self.a < self.b):
                raise ValueError(f"interval endpoints must satisfy a < b, got [{self.a}, {self.b}]")
            object.__setattr__(self, "a", float(self.a))
            object.__setattr__(self, "b", float(self.b))

    @classmethod
    def unit_disk(cls) -> "Geometry":
        return cls(GeometryKind.UNIT_DISK)

    @classmethod
    def interval(cls, a: float = -1.0, b: float = 1.0) -> "Geometry":
        return cls(GeometryKind.INTERVAL, a, b)

    @property
    def center(self) -> float:
        return 0.0 if self.kind is GeometryKind.UNIT_DISK else 0.5 * (self.a + self.b)

    @property
    def half_width(self) -> float:
        return 1.0 if self.kind is GeometryKind.UNIT_DISK else 0.5 * (self.b - self.a)

    def pullback(self, z):
        """Affine coordinate ``u`` in which the interval becomes [-1, 1]."""
        return (np.asarray(z, dtype=complex) - self.center) / self.half_width

    def contains(self, z):
        """Boolean mask of points lying in E."""
        z = np.asarray(z, dtype=complex)
        if self.kind is GeometryKind.UNIT_DISK:
            return _unwrap(np.abs(z) <= 1.0)
        return _unwrap((z.imag == 0.0) & (z.real >= self.a) & (z.real <= self.b))

    def _phi_unchecked(self, z):
        if self.kind is GeometryKind.UNIT_DISK:
            return np.asarray(z, dtype=complex)
        u = self.pullback(z)
        # sqrt(u-1)*sqrt(u+1), not sqrt(u**2-1): continuous on C \ [-1, 1]
        return u + np.sqrt(u - 1.0) * np.sqrt(u + 1.0)

    def phi(self, z):
        """Exterior map Phi; raises DomainError for points of E."""
        if np.any(self.contains(z)):
            raise DomainError("phi is defined only outside E")
        return _unwrap(self._phi_unchecked(z))

    def phi_prime(self, z):
        """Derivative of Phi outside E."""
        if np.any(self.contains(z)):
            raise DomainError("phi' is defined only outside E")
        if self.kind is GeometryKind.UNIT_DISK:
            return _unwrap(np.ones_like(np.asarray(z, dtype=complex)))
        u = self.pullback(z)
        root = np.sqrt(u - 1.0) * np.sqrt(u + 1.0)
        return _unwrap((u + root) / root / self.half_width)

    def psi(self, w):
        """Inverse map Psi from {|w| > 1} back to the complement of E."""
        w = np.asarray(w, dtype=complex)
        if np.any(np.abs(w) <= 1.0):
            raise DomainError("psi requires |w| > 1")
        if self.kind is GeometryKind.UNIT_DISK:
            return _unwrap(w)
        return _unwrap(self.center + 0.5 * self.half_width * (w + 1.0 / w))

    def capacity(self) -> float:
        """Logarithmic capacity, the limit of z / Phi(z) at infinity."""
        if self.kind is GeometryKind.UNIT_DISK:
            return 1.0
        return (self.b - self.a) / 4.0

    def level_indicator(self, z):
        """|Phi(z)| outside E and exactly 1 on E."""
        z = np.asarray(z, dtype=complex)
        inside = np.asarray(self.contains(z))
        safe = np.where(inside, self.center + 2.0 * self.half_width + 1.0, z)
        level = np.abs(self._phi_unchecked(safe))
        return _unwrap(np.where(inside, 1.0, level))


def phi(g: Geometry, z):
    return g.phi(z)


def psi(g: Geometry, w):
    return g.psi(w)


def capacity(g: Geometry) -> float:
    return g.capacity()


def level_indicator(g: Geometry, z):
    return g.level_indicator(z)
