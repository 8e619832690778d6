"""kl-analyzer: certificates and empirical estimates of Kurdyka-Lojasiewicz
exponents and moduli for structured nonsmooth functions."""

from .model import (
    KLQuery,
    L1Regularized,
    LpLeastSquares,
    MaxOfSmooth,
    Point,
    PolynomialOracle,
    Quadratic,
    Smooth,
    SmoothOracle,
    Staircase1D,
    evaluate,
    hessian_check,
)

__version__ = "0.1.0"

__all__ = [
    "Point",
    "SmoothOracle",
    "Quadratic",
    "PolynomialOracle",
    "Smooth",
    "MaxOfSmooth",
    "L1Regularized",
    "LpLeastSquares",
    "Staircase1D",
    "KLQuery",
    "evaluate",
    "hessian_check",
    "__version__",
]
