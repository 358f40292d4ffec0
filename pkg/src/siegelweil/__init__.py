"""Exact two-sided verification of an arithmetic degree identity for
one-dimensional Hermitian lattices over imaginary quadratic fields.

The package computes, independently, the degrees of divisibility-weighted
special point counts on a stacky point model and the derivative Fourier
coefficients of the matching weight-one Eisenstein series, then compares
them exactly (in Q + Q.log p) at finite places and numerically at the
archimedean place.
"""

from .field import (
    INF,
    LogLinear,
    ClassGroup,
    Ideal,
    class_group,
    hilbert_symbol,
    is_fundamental_discriminant,
    kronecker,
    splitting_type,
)
from .hermitian import Collection, Lattice, coherent_neighbor
from .eisenstein import (
    central_value_coefficient,
    derivative_coefficient,
    kappa_derivative,
    kappa_sw,
    siegel_weil_check,
    stack_mass,
)
from .cycles import arithmetic_degree

__all__ = [
    "INF",
    "LogLinear",
    "ClassGroup",
    "Ideal",
    "class_group",
    "hilbert_symbol",
    "is_fundamental_discriminant",
    "kronecker",
    "splitting_type",
    "Collection",
    "Lattice",
    "coherent_neighbor",
    "central_value_coefficient",
    "derivative_coefficient",
    "kappa_derivative",
    "kappa_sw",
    "siegel_weil_check",
    "stack_mass",
    "arithmetic_degree",
]
