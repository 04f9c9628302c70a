"""Numerical laboratory for weighted variable-exponent Lebesgue spaces on the
complex unit ball: pseudo-distance geometry, graded quadrature, Luxemburg
norms, weight-class constants, averaging/projection operators and a
check-suite harness with machine-readable reports."""

__version__ = "0.1.0"
