"""Linear Pade-orthogonal approximants and row-sequence analysis."""

from .approximant import Approximant, build_approximant, build_numerator, delta_determinant, moment_matrix, solve_denominator
from .basis import CoefficientVector, Family, MeasureBasis
from .expansion import ExpansionCoeffs, FunctionSpec, Pole, fourier_coeffs, rho0_estimate
from .geometry import Geometry, GeometryKind
from .rowseq import RowSequenceReport, analyze_row

__version__ = "0.1.0"

__all__ = [
    "Approximant",
    "CoefficientVector",
    "ExpansionCoeffs",
    "Family",
    "FunctionSpec",
    "Geometry",
    "GeometryKind",
    "MeasureBasis",
    "Pole",
    "RowSequenceReport",
    "analyze_row",
    "build_approximant",
    "build_numerator",
    "delta_determinant",
    "fourier_coeffs",
    "moment_matrix",
    "rho0_estimate",
    "solve_denominator",
]
