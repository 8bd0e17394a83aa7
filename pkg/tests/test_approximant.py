import math

import numpy as np
import pytest
import scipy.linalg
from hypothesis import given, settings
from hypothesis import strategies as st

from padeortho.approximant import (
    UNIQUENESS_THRESHOLD,
    build_approximant,
    build_numerator,
    defect_coefficients,
    delta_determinant,
    evaluate,
    moment_matrix,
    solve_denominator,
)
from padeortho.basis import CoefficientVector, MeasureBasis
from padeortho.errors import PoleError, SingularSystemError, TruncationError
from padeortho.expansion import EntireKind, FunctionSpec, Pole, fourier_coeffs, partial_sum

CIRCLE = MeasureBasis.circle()
CHEB1 = MeasureBasis.chebyshev1()
TWO_POLE = FunctionSpec.inverse_sum(2.0, 3.0)
BASES = [CIRCLE, CHEB1, MeasureBasis.chebyshev2(), MeasureBasis.legendre(), MeasureBasis.legendre(0.0, 4.0)]
ids = lambda b: f"{b.family.value}[{b.geometry.a},{b.geometry.b}]"


def taylor(k):
    return 2.0 ** (-k - 1) + 3.0 ** (-k - 1)


def classical_pade(a, n, m):
    """Monic-normalized Q (ascending) and P of the classical [n/m] from Taylor data.

    Denominator from the Toeplitz system sum_j d_j a_{n+i-j} = 0, i = 1..m,
    with d_0 = 1; then Q is rescaled so that its z^m coefficient is 1.
    """
    coef = lambda k: a[k] if k >= 0 else 0.0
    col = [coef(n + i) for i in range(m)]
    row = [coef(n - j) for j in range(m)]
    rhs = -np.array([coef(n + i) for i in range(1, m + 1)])
    d = np.concatenate([[1.0], scipy.linalg.solve_toeplitz((col, row), rhs)])
    p = np.array([sum(d[j] * coef(k - j) for j in range(min(k, m) + 1)) for k in range(n + 1)])
    return d / d[m], p / d[m]


def test_moment_matrix_examples():
    c = fourier_coeffs(TWO_POLE, CIRCLE, 30)
    M = moment_matrix(c, CIRCLE, 7, 1)
    assert M.shape == (1, 2)
    assert M[0, 0] == c.entries[8] and M[0, 1] == c.entries[7]
    assert moment_matrix(c, CIRCLE, 7, 0).shape == (0, 1)

    f = FunctionSpec.inverse_sum(2.0)
    c = fourier_coeffs(f, CHEB1, 20)
    M = moment_matrix(c, CHEB1, 5, 1)
    p6 = lambda x: CHEB1.eval_p(6, x)
    assert M[0, 0] == pytest.approx(CHEB1.second_type_fn(6, 2.0), rel=1e-14)
    assert M[0, 1] == pytest.approx(CHEB1.quadrature_inner(lambda x: x * f(x), p6), rel=1e-9)


def test_moment_matrix_needs_enough_coefficients():
    c = fourier_coeffs(TWO_POLE, CHEB1, 12)
    moment_matrix(c, CHEB1, 9, 1)
    with pytest.raises(TruncationError):
        moment_matrix(c, CHEB1, 10, 2)


def test_delta_examples():
    single = fourier_coeffs(FunctionSpec.inverse_sum(2.0), CIRCLE, 40)
    for n in range(31):
        assert delta_determinant(single, CIRCLE, n, 2) <= 1e-12
        assert delta_determinant(single, CIRCLE, n, 1) == 1.0
    poly = fourier_coeffs(FunctionSpec(entire=EntireKind.POLYNOMIAL, polynomial=(1.0, 2.0)), CHEB1, 10)
    assert delta_determinant(poly, CHEB1, 3, 1) == 0.0


def test_solve_denominator_examples():
    c = fourier_coeffs(TWO_POLE, CIRCLE, 30)
    Q, unique = solve_denominator(c, CIRCLE, 10, 1)
    assert unique and Q[1] == 1
    assert -Q[0] == pytest.approx(taylor(10) / taylor(11), rel=1e-14)
    assert -Q[0] == pytest.approx(2.0076503, abs=5e-6)
    Q, unique = solve_denominator(c, CIRCLE, 10, 0)
    assert unique and Q.tolist() == [1]
    c = fourier_coeffs(FunctionSpec.inverse_sum(1.5), CHEB1, 40)
    Q, _ = solve_denominator(c, CHEB1, 30, 1)
    assert abs(-Q[0] - 1.5) <= 1e-6


def test_strict_mode_raises_with_solution():
    c = fourier_coeffs(FunctionSpec.inverse_sum(2.0), CIRCLE, 20)
    Q, unique = solve_denominator(c, CIRCLE, 5, 2)
    assert not unique
    with pytest.raises(SingularSystemError) as info:
        solve_denominator(c, CIRCLE, 5, 2, strict=True)
    assert np.array_equal(info.value.solution, Q)
    # the least-norm denominator still carries the true pole
    assert np.any(np.abs(np.roots(Q[::-1]) - 2.0) < 1e-10)


def test_reduced_degree_denominator():
    # F is [1/2]; no degree-3 denominator satisfies the [1/3] conditions
    c = fourier_coeffs(TWO_POLE, CIRCLE, 20)
    a = build_approximant(c, CIRCLE, 1, 3)
    assert not a.unique
    assert np.allclose(a.Q, [6.0, -5.0, 1.0, 0.0], atol=1e-12)
    z = np.array([0.3, -0.5j, 0.6 + 0.2j])
    assert np.allclose(a.evaluate(CIRCLE, z), TWO_POLE(z), rtol=1e-12)


def test_numerator_examples():
    poly = FunctionSpec(entire=EntireKind.POLYNOMIAL, polynomial=(1.0, -1.0, 0.5, 2.0))
    for b in BASES:
        c = fourier_coeffs(poly, b, 10)
        P = build_numerator(c, b, 5, [1.0])
        assert np.array_equal(P.entries, c.entries[:6])
    c = fourier_coeffs(TWO_POLE, CHEB1, 20)
    assert np.array_equal(build_numerator(c, CHEB1, 7, [1.0]).entries, c.entries[:8])


@pytest.mark.parametrize("m", [1, 2, 3])
def test_matches_classical_pade(m):
    a = [taylor(k) for k in range(60)]
    c = CoefficientVector(a)
    for n in range(0, 31):
        approx = build_approximant(c, CIRCLE, n, m)
        if not approx.unique:
            continue
        Q, P = classical_pade(a, n, m)
        assert np.allclose(approx.Q, Q, rtol=1e-9, atol=1e-9 * np.max(np.abs(Q)))
        assert np.allclose(approx.P.entries, P, rtol=1e-9, atol=1e-9 * np.max(np.abs(P)))


def test_evaluate_examples():
    c = fourier_coeffs(TWO_POLE, CIRCLE, 40)
    a = build_approximant(c, CIRCLE, 20, 1)
    assert evaluate(a, CIRCLE, 0.5) == pytest.approx(TWO_POLE(0.5), abs=1e-9)
    root = -a.Q[0]
    with pytest.raises(PoleError):
        a.evaluate(CIRCLE, root)
    assert math.isnan(a.evaluate(CIRCLE, root, on_pole="nan").real)


@pytest.mark.parametrize("b", BASES, ids=ids)
def test_degree_zero_denominator_is_partial_sum(b):
    f = FunctionSpec.inverse_sum(b.geometry.center + 2.0 * b.geometry.half_width, 3.0 + 2j)
    c = fourier_coeffs(f, b, 30)
    z = np.array([0.1, 0.4 + 0.3j, -0.7]) * b.geometry.half_width + b.geometry.center
    for n in (0, 5, 17, 30):
        a = build_approximant(c, b, n, 0)
        assert np.array_equal(a.evaluate(b, z), partial_sum(c, b, z, n))


def defect_by_quadrature(f, a, b, j):
    # integrate QF and P separately; their difference is pure cancellation
    pj = lambda x: b.eval_p(j, x)
    qf = b.quadrature_inner(lambda x: a.denominator(x) * f(x), pj)
    p = b.quadrature_inner(lambda x: a.P.entries @ b.eval_all(a.n, x), pj)
    return qf - p


@pytest.mark.parametrize("b", BASES, ids=ids)
@pytest.mark.parametrize("m", [1, 2, 3])
def test_defect_orthogonality(b, m):
    g = b.geometry
    f = FunctionSpec((Pole.simple(g.center + 1.3 * g.half_width, -1.0),
                      Pole(g.center - 0.5 * g.half_width + 1.2j * g.half_width, 2, (0.3, 0.2)),
                      Pole.simple(g.center + 3.0j * g.half_width, 1.0)))
    if b.is_circle:
        f = FunctionSpec((Pole.simple(1.3, -1.0), Pole(-0.5 + 1.2j, 2, (0.3, 0.2)), Pole.simple(3j, 1.0)))
    c = fourier_coeffs(f, b, 40)
    for n in (4, 11):
        a = build_approximant(c, b, n, m)
        defect, scale = defect_coefficients(a, c, b)
        assert np.all(np.abs(defect) <= 1e-8 * scale.max())
        for j in range(n + m + 1):
            assert abs(defect_by_quadrature(f, a, b, j)) <= 1e-8 * scale.max()


def test_uniqueness_flag_tracks_threshold():
    f = FunctionSpec.inverse_sum(2.0, 3.0 + 1j, -4.0)
    c = fourier_coeffs(f, CIRCLE, 60)
    for n in range(20):
        for m in range(5):
            a = build_approximant(c, CIRCLE, n, m)
            assert a.unique == (a.delta_scaled > UNIQUENESS_THRESHOLD)
            top = np.flatnonzero(a.Q)[-1]
            assert len(a.Q) == m + 1 and a.Q[top] == 1
            assert top == m or not a.unique


@pytest.mark.parametrize("b", BASES, ids=ids)
@pytest.mark.parametrize("k", [-7, -1, 1, 3, 10])
@pytest.mark.parametrize("sign", [1.0, -1.0])
def test_scaling_by_power_of_two_is_bitwise(b, k, sign):
    g = b.geometry
    f = TWO_POLE if b.is_circle else FunctionSpec.inverse_sum(g.center + 1.5 * g.half_width, g.center + 3.0 * g.half_width)
    c = fourier_coeffs(f, b, 30)
    scaled = CoefficientVector(c.entries * (sign * 2.0 ** k))
    for n, m in [(5, 1), (10, 2), (20, 3)]:
        Q1, _ = solve_denominator(c, b, n, m)
        Q2, _ = solve_denominator(scaled, b, n, m)
        assert np.array_equal(Q1, Q2)


@settings(max_examples=60, deadline=None)
@given(st.floats(1e-8, 1e8), st.floats(-math.pi, math.pi))
def test_scaling_invariance_general(mag, arg):
    factor = mag * complex(math.cos(arg), math.sin(arg))
    c = fourier_coeffs(FunctionSpec.inverse_sum(1.5, 3.0, -2.0 + 1j), CHEB1, 30)
    scaled = CoefficientVector(c.entries * factor)
    for n, m in [(5, 1), (10, 2), (20, 3)]:
        Q1, _ = solve_denominator(c, CHEB1, n, m)
        Q2, _ = solve_denominator(scaled, CHEB1, n, m)
        # rounding in the scaled input is amplified by the system's condition number
        M = moment_matrix(c, CHEB1, n, m)
        A = M[:, :m] / np.max(np.abs(M), axis=1)[:, None]
        tol = 1e-14 * max(1.0, np.linalg.cond(A))
        assert np.max(np.abs(Q1 - Q2)) <= tol * np.max(np.abs(Q1))
