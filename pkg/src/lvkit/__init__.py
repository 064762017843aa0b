"""Exact verification toolkit for unramified Euler-factor factorizations,
critical-point sets, CM-period exponent bookkeeping, and Gauss-sum numerics.
"""

from .algebra import (
    Cyclotomic,
    EulerFactorDenom,
    FormalSymbol,
    LaurentPoly,
    cyclotomic_coeffs,
    euler_from_eigenvalues,
    euler_power,
    euler_product,
    euler_sqrt,
    poly_normalize,
    root_symbol,
    symbol,
    tensor_eigenvalues,
)

__all__ = [
    "Cyclotomic",
    "EulerFactorDenom",
    "FormalSymbol",
    "LaurentPoly",
    "cyclotomic_coeffs",
    "euler_from_eigenvalues",
    "euler_power",
    "euler_product",
    "euler_sqrt",
    "poly_normalize",
    "root_symbol",
    "symbol",
    "tensor_eigenvalues",
]

__version__ = "0.1.0"
