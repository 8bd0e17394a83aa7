"""Construction of (n, m) linear Pade-orthogonal approximants.

Given the Fourier coefficients of F, the monic denominator Q of degree m
solves

    sum_j q_j <z^j F, p_{n+i}> = -<z^m F, p_{n+i}>,   i = 1..m,

and the numerator is the projection P = sum_{j<=n} <QF, p_j> p_j. Every
moment <z^j F, p_k> is read off the coefficient stream through the banded
multiplication operator, so no fresh quadrature is needed.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .basis import CoefficientVector, MeasureBasis
from .errors import PoleError, SingularSystemError

#: Scaled |Delta_{n,m}| at or below this marks a non-unique approximant.
UNIQUENESS_THRESHOLD = 1e-10


def _as_vector(c) -> CoefficientVector:
    return c if isinstance(c, CoefficientVector) else CoefficientVector(c)


def _shifted_streams(c: CoefficientVector, b: MeasureBasis, jmax: int, length: int) -> np.ndarray:
    """Rows (J^j c)_0..(J^j c)_{length-1} for j = 0..jmax."""
    out = np.empty((jmax + 1, length), dtype=complex)
    cur = c
    for j in range(jmax + 1):
        if j:
            cur = b.apply_multiplication(cur, 1)
        entries = cur.entries[:length]
        if len(entries) < length:
            if not cur.complete:
                # repeat on the original so the error reports the real shortfall
                b.apply_multiplication(c, j, length)
            entries = np.concatenate([entries, np.zeros(length - len(entries))])
        out[j] = entries
    return out


def moment_matrix(c, b: MeasureBasis, n: int, m: int) -> np.ndarray:
    """m x (m+1) matrix with entry (i-1, j) = <z^j F, p_{n+i}>."""
    c = _as_vector(c)
    if m == 0:
        return np.zeros((0, 1), dtype=complex)
    streams = _shifted_streams(c, b, m, n + m + 1)
    return streams[:, n + 1 : n + m + 1].T.copy()


def _row_normalized(rows: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    scale = np.max(np.abs(rows), axis=1) if rows.size else np.zeros(rows.shape[0])
    safe = np.where(scale > 0, scale, 1.0)
    return rows / safe[:, None], scale


def _scaled_delta(M: np.ndarray) -> float:
    m = M.shape[0]
    if m == 0:
        return 1.0
    sub, scale = _row_normalized(M[:, :m])
    if np.any(scale == 0):
        return 0.0
    return float(abs(np.linalg.det(sub)))


def delta_determinant(c, b: MeasureBasis, n: int, m: int) -> float:
    """|Delta_{n,m}| after dividing each row by its largest entry."""
    return _scaled_delta(moment_matrix(c, b, n, m))


def _solve_monic(M: np.ndarray, unique: bool, rank_tol: float) -> np.ndarray:
    m = M.shape[0]
    rows, _ = _row_normalized(M)
    if unique:
        q = np.linalg.solve(rows[:, :m], -rows[:, m])
        return np.concatenate([q, [1.0 + 0j]])
    # Any null vector of the full system is a valid denominator. Prefer the
    # least-norm monic one; if none has a z^m term, the denominator has
    # lower degree and is normalized on its actual top coefficient.
    _, s, vh = np.linalg.svd(rows)
    rank = int(np.sum(s > rank_tol * s[0])) if s.size and s[0] > 0 else 0
    null = vh[rank:].conj().T
    proj = null @ null[m].conj()
    if proj[m].real > 1e-12:
        Q = proj / proj[m]
        Q[m] = 1.0
        return Q
    v = null[:, 0]
    top = np.flatnonzero(np.abs(v) > 1e-12 * np.max(np.abs(v)))[-1]
    Q = np.zeros(m + 1, dtype=complex)
    Q[: top + 1] = v[: top + 1] / v[top]
    Q[top] = 1.0
    return Q


def solve_denominator(c, b: MeasureBasis, n: int, m: int, threshold: float = UNIQUENESS_THRESHOLD,
                      strict: bool = False) -> tuple[np.ndarray, bool]:
    """Monic Q (ascending power coefficients, length m+1) and the uniqueness flag.

    When the scaled determinant is at or below ``threshold`` the system has
    a family of solutions and ``unique=False``. The least-norm monic member
    is returned; if no solution has degree m, Q is the lower-degree solution
    made monic in its own degree and padded with zeros. With ``strict=True``
    a :class:`SingularSystemError` carrying that solution is raised instead.
    """
    if m == 0:
        return np.array([1.0 + 0j]), True
    M = moment_matrix(c, b, n, m)
    unique = _scaled_delta(M) > threshold
    Q = _solve_monic(M, unique, threshold)
    if not unique and strict:
        raise SingularSystemError(f"Delta_{{{n},{m}}} vanishes numerically", solution=Q)
    return Q, unique


def build_numerator(c, b: MeasureBasis, n: int, Q) -> CoefficientVector:
    """Coordinates <QF, p_j>, j = 0..n."""
    c = _as_vector(c)
    Q = np.asarray(Q, dtype=complex)
    streams = _shifted_streams(c, b, len(Q) - 1, n + 1)
    return CoefficientVector(Q @ streams, complete=True)


@dataclass(frozen=True)
class Approximant:
    """The rational function [n/m] = P/Q.

    ``Q`` holds ascending power-basis coefficients of the monic denominator,
    ``P`` the numerator in the p_k basis.
    """

    n: int
    m: int
    Q: np.ndarray
    P: CoefficientVector
    delta_scaled: float
    unique: bool

    def denominator(self, z):
        return np.polynomial.polynomial.polyval(np.asarray(z, dtype=complex), self.Q)

    def evaluate(self, b: MeasureBasis, z, on_pole: str = "raise"):
        """P(z)/Q(z). ``on_pole="nan"`` returns NaN at denominator zeros instead of raising."""
        z = np.asarray(z, dtype=complex)
        den = self.denominator(z)
        bad = np.abs(den) < 1e-14 * np.max(np.abs(self.Q))
        if np.any(bad) and on_pole == "raise":
            raise PoleError(f"[{self.n}/{self.m}] has a pole at the evaluation point")
        vals = b.eval_all(self.n, z)
        coeffs = self.P.entries.reshape((-1,) + (1,) * z.ndim)
        num = np.sum(coeffs * vals, axis=0)
        with np.errstate(divide="ignore", invalid="ignore"):
            out = np.where(bad, np.nan + 0j, num / np.where(bad, 1.0, den))
        return out.item() if out.ndim == 0 else out


def build_approximant(c, b: MeasureBasis, n: int, m: int, threshold: float = UNIQUENESS_THRESHOLD,
                      strict: bool = False) -> Approximant:
    c = _as_vector(c)
    M = moment_matrix(c, b, n, m)
    delta = _scaled_delta(M)
    Q, unique = solve_denominator(c, b, n, m, threshold, strict)
    P = build_numerator(c, b, n, Q)
    return Approximant(n, m, Q, P, delta, unique)


def evaluate(a: Approximant, b: MeasureBasis, z):
    return a.evaluate(b, z)


def defect_coefficients(a: Approximant, c, b: MeasureBasis) -> tuple[np.ndarray, np.ndarray]:
    """<QF - P, p_j> for j = 0..n+m, and the row scales they are measured against.

    The scale of row j is ``max_i |q_i (J^i c)_j|``.
    """
    c = _as_vector(c)
    length = a.n + a.m + 1
    streams = _shifted_streams(c, b, a.m, length)
    terms = a.Q[:, None] * streams
    defect = terms.sum(axis=0)
    defect[: a.n + 1] -= a.P.entries
    return defect, np.max(np.abs(terms), axis=0)
