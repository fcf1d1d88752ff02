"""Compile HOBO polynomials into CNOT + Z-rotation circuits."""

from .circuit import CNOT, Circuit, CircuitError, Rotation, emit_qasm
from .graycode import compile_gray, gray_walk
from .kernels import BACKEND
from .polynomial import (
    HoboPolynomial,
    IsingPolynomial,
    PolynomialSyntaxError,
    evaluate_hobo,
    evaluate_ising,
    expand_to_ising,
    format_polynomial,
    parse_polynomial,
)
from .template import compile_greedy, template
from .verify import VerificationReport, check_statevector, check_symbolic

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "CNOT",
    "Circuit",
    "CircuitError",
    "HoboPolynomial",
    "IsingPolynomial",
    "PolynomialSyntaxError",
    "Rotation",
    "VerificationReport",
    "check_statevector",
    "check_symbolic",
    "compile_gray",
    "compile_greedy",
    "emit_qasm",
    "evaluate_hobo",
    "evaluate_ising",
    "expand_to_ising",
    "format_polynomial",
    "gray_walk",
    "parse_polynomial",
    "template",
]
