"""Limiting-subdifferential distances, stationarity tests and index
classification for the supported function classes.

The subgradient distance d(0, dF(x)) has a closed form in every class:
the gradient norm for smooth functions, the min-norm point of the
active-gradient hull for max functions, a componentwise soft-threshold
residual for l1-regularized functions, and the support-restricted
gradient for lp least squares (off-support components of the
subdifferential fill all of R, so they contribute nothing).
"""

import math
from dataclasses import dataclass

import numpy as np

from . import numerics
from .errors import DimensionMismatch, NotStationary
from .model import (
    L1Regularized,
    LpLeastSquares,
    MaxOfSmooth,
    Smooth,
    Staircase1D,
    as_point,
    evaluate,
)

STATIONARITY_TOL = 1e-8


def activity_tolerance(f_value):
    """Relative tolerance used for all activity / boundary classification."""
    return 1e-8 * (1.0 + abs(f_value))


@dataclass(frozen=True)
class IndexPartition:
    """The four l1 index sets at a stationary point.

    I : zero coordinate, gradient strictly inside (-mu, mu)
    J : nonzero coordinate (gradient pinned at -mu * sign)
    Kplus / Kminus : zero coordinate with gradient exactly at +mu / -mu
    """

    I: frozenset
    J: frozenset
    Kplus: frozenset
    Kminus: frozenset

    @property
    def ri_case(self):
        """True when K+ and K- are empty (0 in the relative interior)."""
        return not self.Kplus and not self.Kminus

    def validate(self, n):
        sets = [self.I, self.J, self.Kplus, self.Kminus]
        union = set()
        total = 0
        for s in sets:
            union |= s
            total += len(s)
        if total != len(union) or union != set(range(n)):
            raise AssertionError("index sets must partition {0..n-1}")


@dataclass(frozen=True)
class ActiveSetData:
    """Active branch data of a max function at a point."""

    active: tuple
    values: np.ndarray
    gradients: tuple
    hessians: tuple


def active_set(f, xbar):
    """Indices within the activity tolerance of the max, with their
    gradients and Hessians at xbar."""
    x = as_point(xbar).coords
    vals = np.array([o.value(x) for o in f.oracles])
    fmax = float(np.max(vals))
    tau = activity_tolerance(fmax)
    active = tuple(i for i in range(len(f.oracles)) if vals[i] >= fmax - tau)
    grads = tuple(f.oracles[i].gradient(x) for i in active)
    hesss = tuple(f.oracles[i].hessian(x) for i in active)
    return ActiveSetData(active, vals, grads, hesss)


def activity_margin(f, x):
    """Smallest positive gap max - f_i at x; +inf when all branches tie.

    Samples whose margin sits inside the tolerance band cannot be
    classified reliably and are rejected by the sampling oracle.
    """
    vals = [o.value(x) for o in f.oracles]
    fmax = max(vals)
    tau = activity_tolerance(fmax)
    margin = math.inf
    for v in vals:
        gap = fmax - v
        if gap > tau and gap < margin:
            margin = gap
    return margin


def subgrad_distance(f, x):
    """Distance from 0 to the limiting subdifferential of f at x."""
    x = as_point(x).coords
    if f.dimension != x.shape[0]:
        raise DimensionMismatch("function dimension %d, point dimension %d" % (f.dimension, x.shape[0]))
    if isinstance(f, Smooth):
        g = f.oracle.gradient(x)
        return float(np.sqrt(np.dot(g, g)))
    if isinstance(f, MaxOfSmooth):
        data = active_set(f, x)
        pts = np.asarray(data.gradients)
        v, _ = numerics.min_norm_point(pts)
        return float(np.sqrt(np.dot(v, v)))
    if isinstance(f, L1Regularized):
        g = f.oracle.gradient(x)
        total = 0.0
        for i in range(x.shape[0]):
            if x[i] != 0.0:
                r = g[i] + f.mu * math.copysign(1.0, x[i])
            else:
                r = max(abs(g[i]) - f.mu, 0.0)
            total += r * r
        return math.sqrt(total)
    if isinstance(f, LpLeastSquares):
        g_smooth = 2.0 * (f.A.T @ (f.A @ x - f.b))
        total = 0.0
        for i in range(x.shape[0]):
            if x[i] != 0.0:
                r = g_smooth[i] + f.mu * f.p * math.copysign(abs(x[i]) ** (f.p - 1.0), x[i])
                total += r * r
        return math.sqrt(total)
    if isinstance(f, Staircase1D):
        return 2.0 * abs(float(x[0]))
    raise DimensionMismatch("unknown function class %r" % type(f))


def multiplier_polytope_feasible(f, xbar):
    """Feasibility of {lambda >= 0, sum lambda = 1,
    sum lambda_i grad f_i(xbar) = 0} over the active branches."""
    data = active_set(f, xbar)
    m = len(data.active)
    n = f.dimension
    a_eq = np.zeros((n + 1, m))
    a_eq[0, :] = 1.0
    for col, g in enumerate(data.gradients):
        a_eq[1:, col] = g
    b_eq = np.zeros(n + 1)
    b_eq[0] = 1.0
    res = numerics.solve_lp(np.zeros(m), a_eq, b_eq, [(0.0, math.inf)] * m)
    return res.status == numerics.OPTIMAL


def is_stationary(f, x, tol=STATIONARITY_TOL):
    """True iff d(0, dF(x)) <= tol; max functions additionally require a
    feasible multiplier polytope."""
    dist = subgrad_distance(f, x)
    if dist > tol:
        return False
    if isinstance(f, MaxOfSmooth):
        return multiplier_polytope_feasible(f, x)
    return True


def classify_l1_indices(f, xbar, tol=STATIONARITY_TOL):
    """Partition {0..n-1} into the I / J / K+ / K- sets at a stationary
    point of an l1-regularized function."""
    if not isinstance(f, L1Regularized):
        raise DimensionMismatch("l1-regularized function expected")
    x = as_point(xbar).coords
    if not is_stationary(f, x, tol):
        raise NotStationary("point is not stationary within tol=%g" % tol)
    tau = activity_tolerance(evaluate(f, x))
    g = f.oracle.gradient(x)
    I, J, Kp, Km = set(), set(), set(), set()
    for i in range(x.shape[0]):
        if abs(x[i]) > tau:
            J.add(i)
        elif abs(g[i] - f.mu) <= tau:
            Kp.add(i)
        elif abs(g[i] + f.mu) <= tau:
            Km.add(i)
        elif abs(g[i]) < f.mu:
            I.add(i)
        else:
            raise NotStationary("coordinate %d violates the stationarity system" % i)
    part = IndexPartition(frozenset(I), frozenset(J), frozenset(Kp), frozenset(Km))
    part.validate(x.shape[0])
    return part
