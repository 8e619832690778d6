import math

import numpy as np
import pytest

from kl_analyzer import fixtures
from kl_analyzer.model import Smooth


@pytest.fixture
def degenerate_oracle():
    return fixtures.degenerate_curvature_oracle()


@pytest.fixture
def degenerate_smooth(degenerate_oracle):
    return Smooth(degenerate_oracle)


@pytest.fixture
def degenerate_xbar():
    return np.array([1.0, 1.0])


def charpoly_eigenvalues(a, lo=None, hi=None, grid=4000):
    """Independent eigenvalue oracle for small symmetric matrices with
    distinct eigenvalues: bracket sign changes of det(A - t I) on a grid
    and bisect each bracket.  Uses a determinant recursion, not the
    Jacobi path under test.
    """
    a = np.asarray(a, dtype=np.float64)
    n = a.shape[0]

    def det(m):
        m = np.array(m)
        size = m.shape[0]
        if size == 1:
            return m[0, 0]
        total = 0.0
        for j in range(size):
            minor = np.delete(np.delete(m, 0, axis=0), j, axis=1)
            total += ((-1.0) ** j) * m[0, j] * det(minor)
        return total

    def p(t):
        return det(a - t * np.eye(n))

    radius = float(np.max(np.abs(a))) * n + 1.0
    lo = -radius if lo is None else lo
    hi = radius if hi is None else hi
    ts = np.linspace(lo, hi, grid)
    vals = [p(t) for t in ts]
    roots = []
    for i in range(grid - 1):
        if vals[i] == 0.0:
            roots.append(float(ts[i]))
        elif vals[i] * vals[i + 1] < 0.0:
            a_t, b_t = float(ts[i]), float(ts[i + 1])
            fa = vals[i]
            for _ in range(200):
                mid = 0.5 * (a_t + b_t)
                fm = p(mid)
                if fa * fm <= 0.0:
                    b_t = mid
                else:
                    a_t = mid
                    fa = fm
            roots.append(0.5 * (a_t + b_t))
    return sorted(roots, reverse=True)


def lp_scalar_stationary_point(mu=1.0, p=0.5, b=3.0, tol=1e-13):
    """Bisection for 2(t - b) + mu p t^(p-1) = 0 on (b/2, b)."""

    def g(t):
        return 2.0 * (t - b) + mu * p * t ** (p - 1.0)

    lo, hi = b / 2.0, b
    assert g(lo) * g(hi) < 0.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if g(lo) * g(mid) <= 0.0:
            hi = mid
        else:
            lo = mid
        if hi - lo < tol:
            break
    return 0.5 * (lo + hi)


def lp_scalar_modulus(mu=1.0, p=0.5, b=3.0):
    t = lp_scalar_stationary_point(mu, p, b)
    h = 2.0 + mu * p * (p - 1.0) * t ** (p - 2.0)
    return t, h, math.sqrt(h / 2.0)
