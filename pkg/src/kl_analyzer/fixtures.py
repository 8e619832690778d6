"""Canonical built-in fixtures used by the test suite and the docs."""

import numpy as np

from .model import (
    L1Regularized,
    LpLeastSquares,
    MaxOfSmooth,
    PolynomialOracle,
    Quadratic,
    Smooth,
    Staircase1D,
)


def degenerate_curvature_oracle():
    """-(x1 + x2 - 6)^2 - 16 sqrt(|x1|) - 16 sqrt(|x2|).

    Smooth near (1, 1) with vanishing gradient there and the singular
    Hessian [[2, -2], [-2, 2]]; its sharp KL exponent at (1, 1) is 2/3,
    so it separates the quadratic-model modulus from the true one.
    """
    terms = [
        (-1.0, (2, 0)),
        (-1.0, (0, 2)),
        (-2.0, (1, 1)),
        (12.0, (1, 0)),
        (12.0, (0, 1)),
        (-36.0, (0, 0)),
    ]
    abs_terms = [(-16.0, 0, 0.5), (-16.0, 1, 0.5)]
    return PolynomialOracle(2, terms, abs_terms)


DEGENERATE_XBAR = np.array([1.0, 1.0])


def smooth_indefinite():
    """diag(2, -1) quadratic: sharp exponent 1/2 with modulus 1."""
    return Smooth(Quadratic(np.diag([2.0, -1.0])))


def smooth_identity(n=2):
    return Smooth(Quadratic(np.eye(n)))


def two_ball_max():
    """max(||x||^2 / 2, ||x||^2): modulus 1 at the origin."""
    return MaxOfSmooth((Quadratic(np.eye(2)), Quadratic(2.0 * np.eye(2))))


def abs_x1_max():
    """max(x1, -x1) in the plane: flat along e2, not certifiable."""
    zero = np.zeros((2, 2))
    return MaxOfSmooth((Quadratic(zero, c=[1.0, 0.0]), Quadratic(zero, c=[-1.0, 0.0])))


def l1_interior_fixture():
    """Quadratic with Hessian eigenvalues {1, 3} plus the l1 term, tuned
    so xbar = (1, 1) is stationary with empty K+ and K-: modulus
    sqrt(1/2)."""
    h = np.array([[2.0, 1.0], [1.0, 2.0]])
    c = -(h @ np.ones(2)) - np.ones(2)
    return L1Regularized(Quadratic(h, c=c), 1.0), np.array([1.0, 1.0])


def lp_scalar_fixture():
    """(t - 3)^2 + sqrt(|t|): the 1-D lp least squares fixture."""
    return LpLeastSquares([[1.0]], [3.0], 1.0, 0.5)


def staircase():
    return Staircase1D()
