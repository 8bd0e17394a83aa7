import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from padeortho.basis import CoefficientVector, MeasureBasis
from padeortho.errors import DegenerateError, DomainError
from padeortho.expansion import (
    ENTIRE,
    EntireKind,
    ExpansionCoeffs,
    FunctionSpec,
    Pole,
    Singularity,
    fourier_coeffs,
    partial_sum,
    rho0_estimate,
    rho0_fit,
)
from padeortho.geometry import Geometry

CIRCLE = MeasureBasis.circle()
CHEB1 = MeasureBasis.chebyshev1()
BASES = [
    CIRCLE,
    CHEB1,
    MeasureBasis.chebyshev2(),
    MeasureBasis.legendre(),
    MeasureBasis.legendre(0.0, 4.0),
    MeasureBasis.chebyshev2(-3.0, 1.0),
]
ids = lambda b: f"{b.family.value}[{b.geometry.a},{b.geometry.b}]"


def by_quadrature(b, f, N):
    return np.array([b.quadrature_inner(f, lambda x, k=k: b.eval_p(k, x)) for k in range(N + 1)])


def test_fourier_examples():
    c = fourier_coeffs(FunctionSpec.inverse_sum(2.0), CIRCLE, 10)
    assert c.entries[3] == 0.0625
    c = fourier_coeffs(FunctionSpec.inverse_sum(2.0), CHEB1, 10)
    root = math.sqrt(3.0)
    assert c.entries[1] == pytest.approx(math.sqrt(2 * math.pi) / (root * (2 + root)), rel=1e-14)
    one = FunctionSpec(entire=EntireKind.POLYNOMIAL, polynomial=(1.0,))
    c = fourier_coeffs(one, CHEB1, 10)
    assert c.entries[0] == pytest.approx(math.sqrt(math.pi), rel=1e-15)
    assert np.all(c.entries[1:] == 0)


@pytest.mark.parametrize("b", BASES, ids=ids)
def test_simple_poles_match_quadrature(b):
    g = b.geometry
    lams = [g.center + 1.6 * g.half_width, g.center - 0.4 * g.half_width + 0.9j * g.half_width]
    f = FunctionSpec((Pole.simple(lams[0], 2.0), Pole.simple(lams[1], -0.5 + 1j)))
    if b.is_circle:
        f = FunctionSpec((Pole.simple(2.5, 2.0), Pole.simple(-1.2 + 0.9j, -0.5 + 1j)))
    c = fourier_coeffs(f, b, 15)
    assert np.allclose(c.entries, by_quadrature(b, f, 15), rtol=1e-9, atol=1e-12)


@pytest.mark.parametrize("b", BASES, ids=ids)
def test_higher_order_poles_match_quadrature(b):
    g = b.geometry
    lam = 2.5 if b.is_circle else g.center + 1.8 * g.half_width + 0.3j * g.half_width
    f = FunctionSpec((Pole(lam, 3, (1.0, -0.5, 0.25 + 0.5j)),))
    c = fourier_coeffs(f, b, 20)
    ref = by_quadrature(b, f, 20)
    assert np.allclose(c.entries, ref, rtol=1e-8, atol=1e-12 * np.max(np.abs(ref)))


@pytest.mark.parametrize("b", BASES, ids=ids)
def test_exp_matches_quadrature(b):
    f = FunctionSpec(entire=EntireKind.EXP)
    c = fourier_coeffs(f, b, 25)
    ref = by_quadrature(b, f, 25)
    assert np.allclose(c.entries, ref, rtol=1e-9, atol=1e-13 * np.max(np.abs(ref)))


@pytest.mark.parametrize("b", BASES, ids=ids)
def test_polynomial_is_exact_and_complete(b):
    poly = (1.0, -2.0, 0.5, 3.0)
    f = FunctionSpec(entire=EntireKind.POLYNOMIAL, polynomial=poly)
    c = fourier_coeffs(f, b, 8)
    assert c.complete
    assert np.allclose(c.entries, by_quadrature(b, f, 8), atol=1e-11)
    assert np.all(c.entries[4:] == 0)


def test_completeness_flags():
    assert not fourier_coeffs(FunctionSpec.inverse_sum(2.0), CHEB1, 5).complete
    assert not fourier_coeffs(FunctionSpec(entire=EntireKind.EXP), CHEB1, 5).complete


def test_pole_inside_e_rejected():
    with pytest.raises(DomainError):
        fourier_coeffs(FunctionSpec.inverse_sum(0.5), CHEB1, 5)
    with pytest.raises(DomainError):
        fourier_coeffs(FunctionSpec.inverse_sum(0.5j), CIRCLE, 5)


def test_pole_validation():
    with pytest.raises(ValueError):
        Pole(2.0, 2, (1.0,))
    with pytest.raises(ValueError):
        Pole(2.0, 1, (0.0,))


def test_total_multiplicity():
    f = FunctionSpec((Pole(2.0, 3, (1, 1, 1)), Pole.simple(3.0)))
    assert f.total_multiplicity == 4


def test_ground_truth_levels():
    g = Geometry.interval()
    f = FunctionSpec.inverse_sum(1.5, 3.0)
    assert f.rho(g, 0) == pytest.approx(2.6180340, rel=1e-7)
    assert f.rho(g, 1) == pytest.approx(5.8284271, rel=1e-7)
    assert f.rho(g, 2) == ENTIRE
    assert f.leading_poles(g, 1) == [1.5]
    assert f.leading_poles(g, 3) is None
    # a declared branch point caps every index
    h = FunctionSpec(f.poles, declared_singularities=(Singularity(1.5, order=1), Singularity(4.0, order=None)))
    assert h.rho(g, 1) == pytest.approx(4 + math.sqrt(15), rel=1e-12)
    assert h.rho(g, 2) == h.rho(g, 1)


def test_text_round_trip_is_lossless():
    c = fourier_coeffs(FunctionSpec.inverse_sum(1.5 + 0.2j, 3.0), CHEB1, 30)
    back = ExpansionCoeffs.from_text(c.to_text(), CHEB1)
    assert np.array_equal(back.entries, c.entries)


def test_text_ingestion_errors():
    with pytest.raises(ValueError):
        ExpansionCoeffs.from_text("0 1 0\n2 1 0\n")
    with pytest.raises(ValueError):
        ExpansionCoeffs.from_text("0 1\n")
    parsed = ExpansionCoeffs.from_text("# header\n\n1 2.0 0\n0 1.0 -1\n")
    assert parsed.entries.tolist() == [1 - 1j, 2 + 0j]


def test_rho0_examples():
    assert rho0_estimate(CoefficientVector([2.0 ** -n for n in range(40)])) == pytest.approx(2.0, rel=1e-12)
    c = fourier_coeffs(FunctionSpec.inverse_sum(2.0), CHEB1, 60)
    assert rho0_estimate(c, (20, 60)) == pytest.approx(2 + math.sqrt(3), rel=0.05)
    poly = FunctionSpec(entire=EntireKind.POLYNOMIAL, polynomial=(1.0, 2.0, 3.0))
    assert rho0_estimate(fourier_coeffs(poly, CHEB1, 40)) == ENTIRE


def test_rho0_entire_exp():
    c = fourier_coeffs(FunctionSpec(entire=EntireKind.EXP), MeasureBasis.legendre(), 30)
    assert rho0_fit(c).entire


def test_rho0_degenerate():
    with pytest.raises(DegenerateError):
        rho0_estimate(CoefficientVector(np.zeros(20)))
    with pytest.raises(ValueError):
        rho0_estimate(CoefficientVector(np.ones(20)), (5, 7))


@settings(max_examples=60, deadline=None)
@given(st.floats(1e-6, 1e6), st.floats(-math.pi, math.pi))
def test_rho0_scale_invariant(mag, arg):
    c = fourier_coeffs(FunctionSpec.inverse_sum(1.5, 3.0), CHEB1, 60)
    scaled = CoefficientVector(c.entries * (mag * complex(math.cos(arg), math.sin(arg))))
    assert rho0_estimate(scaled) == pytest.approx(rho0_estimate(c), rel=1e-9)


complex_st = st.tuples(st.floats(-3, 3), st.floats(-3, 3)).map(lambda t: complex(*t)).filter(lambda z: abs(z) > 1e-3)


@settings(max_examples=60, deadline=None)
@given(complex_st, complex_st)
def test_fourier_coeffs_linear(alpha, beta):
    b = MeasureBasis.legendre()
    f = FunctionSpec.inverse_sum(1.5, -2.0 + 0.5j)
    g = FunctionSpec((Pole(3.0, 2, (0.5, 1.0)),), EntireKind.POLYNOMIAL, (1.0, 0.0, -1.0))
    combo = FunctionSpec(f.scaled(alpha).poles + g.scaled(beta).poles, EntireKind.POLYNOMIAL,
                         tuple(beta * p for p in g.polynomial))
    lhs = fourier_coeffs(combo, b, 20).entries
    rhs = alpha * fourier_coeffs(f, b, 20).entries + beta * fourier_coeffs(g, b, 20).entries
    assert np.allclose(lhs, rhs, rtol=1e-12, atol=1e-13)


def test_partial_sum_converges():
    f = FunctionSpec.inverse_sum(1.5, 3.0)
    c = fourier_coeffs(f, CHEB1, 80)
    x = np.linspace(-1, 1, 11)
    assert np.allclose(partial_sum(c, CHEB1, x), f(x), atol=1e-13)


@pytest.mark.parametrize("b", BASES, ids=ids)
def test_shifted_moments_match_quadrature(b):
    g = b.geometry
    lam = 2.2 if b.is_circle else g.center + 1.4 * g.half_width
    f = FunctionSpec((Pole.simple(lam, -1.0), Pole(lam + 0.5j * g.half_width, 2, (0.5, 1.0))))
    c = fourier_coeffs(f, b, 30)
    for j in (1, 3):
        moments = b.apply_multiplication(c, j)
        zj = lambda x, j=j: x ** j * f(x)
        ref = by_quadrature(b, zj, len(moments) - 1)
        assert np.allclose(moments.entries, ref, rtol=1e-9, atol=1e-12 * np.max(np.abs(ref)))
