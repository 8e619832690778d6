"""Function classes, query containers and exact evaluation contracts.

Four structured classes are supported, each with analytic value,
gradient and Hessian information where the class is smooth:

* ``Smooth``            -- f(x) from a C^2 oracle
* ``MaxOfSmooth``       -- max(f_1(x), ..., f_m(x)) over C^2 oracles
* ``L1Regularized``     -- f(x) + mu * ||x||_1
* ``LpLeastSquares``    -- ||A x - b||^2 + mu * ||x||_p^p, 0 < p < 1

plus ``Staircase1D``, a pathological one-dimensional fixture with a
countable family of downward jumps, used only by the sampling oracle.

Everything is immutable after construction and evaluation is pure.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, DomainError


def _frozen(a):
    a = np.array(a, dtype=np.float64)
    a.setflags(write=False)
    return a


class Point:
    """A point of R^n: finite coordinates, dimension >= 1, immutable."""

    __slots__ = ("coords",)

    def __init__(self, coords):
        arr = np.array(coords, dtype=np.float64).reshape(-1)
        if arr.size < 1:
            raise DimensionMismatch("dimension must be at least 1")
        if not np.all(np.isfinite(arr)):
            raise DomainError("point coordinates must be finite")
        arr.setflags(write=False)
        object.__setattr__(self, "coords", arr)

    @property
    def dimension(self):
        return self.coords.shape[0]

    def __repr__(self):
        return "Point(%s)" % np.array2string(self.coords, separator=", ")


def as_point(x):
    return x if isinstance(x, Point) else Point(x)


class SmoothOracle:
    """Evaluation contract for a C^2 function: value, gradient, Hessian.

    Hessians are symmetrized on return.  Concrete oracles must agree
    with central finite differences of their value (the property suite
    enforces this contract on every fixture).
    """

    dimension = None

    def value(self, x):
        raise NotImplementedError

    def gradient(self, x):
        raise NotImplementedError

    def hessian(self, x):
        raise NotImplementedError

    def _check_dim(self, x):
        if x.shape[0] != self.dimension:
            raise DimensionMismatch(
                "oracle dimension %d, point dimension %d" % (self.dimension, x.shape[0])
            )


def _symmetrized(h):
    return 0.5 * (h + h.T)


class Quadratic(SmoothOracle):
    """(1/2) x^T Q x + c^T x + d with Q stored symmetric."""

    def __init__(self, Q, c=None, d=0.0):
        Q = np.asarray(Q, dtype=np.float64)
        if Q.ndim != 2 or Q.shape[0] != Q.shape[1]:
            raise DimensionMismatch("Q must be square")
        n = Q.shape[0]
        if c is None:
            c = np.zeros(n)
        c = np.asarray(c, dtype=np.float64).reshape(-1)
        if c.shape[0] != n:
            raise DimensionMismatch("c length must match Q")
        self.Q = _frozen(_symmetrized(Q))
        self.c = _frozen(c)
        self.d = float(d)
        self.dimension = n

    def value(self, x):
        x = np.asarray(x, dtype=np.float64)
        self._check_dim(x)
        return 0.5 * float(x @ self.Q @ x) + float(self.c @ x) + self.d

    def gradient(self, x):
        x = np.asarray(x, dtype=np.float64)
        self._check_dim(x)
        return self.Q @ x + self.c

    def hessian(self, x):
        x = np.asarray(x, dtype=np.float64)
        self._check_dim(x)
        return _symmetrized(np.array(self.Q))


class PolynomialOracle(SmoothOracle):
    """Multivariate polynomial plus optional powers of |x_i|.

    Parameters
    ----------
    dimension : int
    terms : list of (coefficient, exponents)
        Monomials c * prod_i x_i ** e_i with nonnegative integer e_i.
    abs_terms : list of (coefficient, index, power), optional
        Terms c * |x_index| ** q with 0 < q < 2.  These are smooth only
        away from x_index = 0; evaluation at x_index = 0 raises
        DomainError.
    """

    def __init__(self, dimension, terms, abs_terms=()):
        self.dimension = int(dimension)
        if self.dimension < 1:
            raise DimensionMismatch("dimension must be at least 1")
        parsed = []
        for coeff, exps in terms:
            exps = tuple(int(e) for e in exps)
            if len(exps) != self.dimension or any(e < 0 for e in exps):
                raise DomainError("bad exponent vector %r" % (exps,))
            parsed.append((float(coeff), exps))
        self.terms = tuple(parsed)
        parsed_abs = []
        for coeff, idx, q in abs_terms:
            idx = int(idx)
            q = float(q)
            if not 0 <= idx < self.dimension:
                raise DimensionMismatch("abs-term index out of range")
            if not 0.0 < q < 2.0:
                raise DomainError("abs-term power must lie in (0, 2)")
            parsed_abs.append((float(coeff), idx, q))
        self.abs_terms = tuple(parsed_abs)

    def _check_domain(self, x):
        for _, idx, _q in self.abs_terms:
            if x[idx] == 0.0:
                raise DomainError("abs-power term undefined at x_%d = 0" % idx)

    def value(self, x):
        x = np.asarray(x, dtype=np.float64)
        self._check_dim(x)
        self._check_domain(x)
        total = 0.0
        for coeff, exps in self.terms:
            term = coeff
            for i, e in enumerate(exps):
                if e:
                    term *= x[i] ** e
            total += term
        for coeff, idx, q in self.abs_terms:
            total += coeff * abs(x[idx]) ** q
        return float(total)

    def gradient(self, x):
        x = np.asarray(x, dtype=np.float64)
        self._check_dim(x)
        self._check_domain(x)
        g = np.zeros(self.dimension)
        for coeff, exps in self.terms:
            for i, e in enumerate(exps):
                if e == 0:
                    continue
                part = coeff * e
                for j, ej in enumerate(exps):
                    power = ej - 1 if j == i else ej
                    if power:
                        part *= x[j] ** power
                g[i] += part
        for coeff, idx, q in self.abs_terms:
            g[idx] += coeff * q * math.copysign(abs(x[idx]) ** (q - 1.0), x[idx])
        return g

    def hessian(self, x):
        x = np.asarray(x, dtype=np.float64)
        self._check_dim(x)
        self._check_domain(x)
        n = self.dimension
        h = np.zeros((n, n))
        for coeff, exps in self.terms:
            for i, ei in enumerate(exps):
                if ei == 0:
                    continue
                for j, ej in enumerate(exps):
                    if i == j:
                        if ei < 2:
                            continue
                        part = coeff * ei * (ei - 1)
                    else:
                        if ej == 0:
                            continue
                        part = coeff * ei * ej
                    for t, et in enumerate(exps):
                        power = et
                        if t == i:
                            power -= 1
                        if t == j:
                            power -= 1
                        if power:
                            part *= x[t] ** power
                    h[i, j] += part
        for coeff, idx, q in self.abs_terms:
            h[idx, idx] += coeff * q * (q - 1.0) * abs(x[idx]) ** (q - 2.0)
        return _symmetrized(h)


@dataclass(frozen=True)
class Smooth:
    """A single C^2 function."""

    oracle: SmoothOracle

    @property
    def dimension(self):
        return self.oracle.dimension


@dataclass(frozen=True)
class MaxOfSmooth:
    """Pointwise max of finitely many C^2 functions."""

    oracles: tuple

    def __post_init__(self):
        oracles = tuple(self.oracles)
        if not oracles:
            raise DimensionMismatch("at least one member required")
        dims = {o.dimension for o in oracles}
        if len(dims) != 1:
            raise DimensionMismatch("members disagree on dimension")
        object.__setattr__(self, "oracles", oracles)

    @property
    def dimension(self):
        return self.oracles[0].dimension


@dataclass(frozen=True)
class L1Regularized:
    """f(x) + mu * ||x||_1 for a C^2 oracle f and mu > 0."""

    oracle: SmoothOracle
    mu: float

    def __post_init__(self):
        if not self.mu > 0:
            raise DomainError("mu must be positive")

    @property
    def dimension(self):
        return self.oracle.dimension


@dataclass(frozen=True)
class LpLeastSquares:
    """||A x - b||^2 + mu * sum_i |x_i|^p with 0 < p < 1."""

    A: np.ndarray
    b: np.ndarray
    mu: float
    p: float

    def __post_init__(self):
        A = _frozen(np.atleast_2d(np.asarray(self.A, dtype=np.float64)))
        b = _frozen(np.asarray(self.b, dtype=np.float64).reshape(-1))
        if A.shape[0] != b.shape[0]:
            raise DimensionMismatch("A and b row counts differ")
        if not self.mu > 0:
            raise DomainError("mu must be positive")
        if not 0.0 < self.p < 1.0:
            raise DomainError("p must lie in (0, 1)")
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "mu", float(self.mu))
        object.__setattr__(self, "p", float(self.p))

    @property
    def dimension(self):
        return self.A.shape[1]


@dataclass(frozen=True)
class Staircase1D:
    """One-dimensional staircase fixture.

    f(0) = 0, f(x) = x^2 + 1/4 for |x| > 1/2 and
    f(x) = x^2 + 1/n - 1/n^2 on 1/n < |x| <= 1/(n-1), n = 3, 4, ...
    The function jumps down as |x| decreases through each 1/n, so no
    single power inequality between the subgradient distance and the
    value gap can hold near 0.
    """

    @property
    def dimension(self):
        return 1

    def value(self, t):
        t = float(t)
        if t == 0.0:
            return 0.0
        a = abs(t)
        if a > 0.5:
            return t * t + 0.25
        n = math.floor(1.0 / a) + 1
        return t * t + 1.0 / n - 1.0 / (n * n)


_CLASSES = (Smooth, MaxOfSmooth, L1Regularized, LpLeastSquares, Staircase1D)


@dataclass(frozen=True)
class KLQuery:
    """A certification/sampling query: function, base point, exponent
    theta in [0, 1), search radius and level window."""

    function: object
    xbar: Point
    theta: float = 0.5
    radius_eps: float = 0.1
    level_nu: float = math.inf

    def __post_init__(self):
        if not isinstance(self.function, _CLASSES):
            raise DomainError("unknown function class %r" % type(self.function))
        object.__setattr__(self, "xbar", as_point(self.xbar))
        if not 0.0 <= self.theta < 1.0:
            raise DomainError("theta must lie in [0, 1)")
        if not self.radius_eps > 0:
            raise DomainError("radius_eps must be positive")
        if not self.level_nu > 0:
            raise DomainError("level_nu must be positive")
        if self.function.dimension != self.xbar.dimension:
            raise DimensionMismatch("function and point dimensions differ")


def evaluate(f, x):
    """Exact value of a structured function at a point.

    MaxOfSmooth returns the max over members; L1/Lp add the regularizer
    analytically.  Raises DimensionMismatch or DomainError as needed.
    """
    x = as_point(x).coords
    if f.dimension != x.shape[0]:
        raise DimensionMismatch("function dimension %d, point dimension %d" % (f.dimension, x.shape[0]))
    if isinstance(f, Smooth):
        return f.oracle.value(x)
    if isinstance(f, MaxOfSmooth):
        best = -math.inf
        for o in f.oracles:
            v = o.value(x)
            if v > best:
                best = v
        return best
    if isinstance(f, L1Regularized):
        reg = 0.0
        for t in x:
            reg += abs(t)
        return f.oracle.value(x) + f.mu * reg
    if isinstance(f, LpLeastSquares):
        r = f.A @ x - f.b
        reg = 0.0
        for t in x:
            if t != 0.0:
                reg += abs(t) ** f.p
        return float(r @ r) + f.mu * reg
    if isinstance(f, Staircase1D):
        return f.value(x[0])
    raise DomainError("unknown function class %r" % type(f))


def member_values(f, x):
    """All member values of a MaxOfSmooth at x (in member order)."""
    x = as_point(x).coords
    return np.array([o.value(x) for o in f.oracles])


def hessian_check(oracle, x, h):
    """Max absolute deviation between the analytic Hessian and central
    second differences of the value with step h."""
    x = as_point(x).coords
    if h <= 0:
        raise DomainError("step must be positive")
    n = oracle.dimension
    H = oracle.hessian(x)
    worst = 0.0
    fcc = oracle.value(x)
    for i in range(n):
        ei = np.zeros(n)
        ei[i] = h
        fp = oracle.value(x + ei)
        fm = oracle.value(x - ei)
        approx = (fp - 2.0 * fcc + fm) / (h * h)
        worst = max(worst, abs(approx - H[i, i]))
        for j in range(i + 1, n):
            ej = np.zeros(n)
            ej[j] = h
            fpp = oracle.value(x + ei + ej)
            fpm = oracle.value(x + ei - ej)
            fmp = oracle.value(x - ei + ej)
            fmm = oracle.value(x - ei - ej)
            approx = (fpp - fpm - fmp + fmm) / (4.0 * h * h)
            worst = max(worst, abs(approx - H[i, j]))
    return worst


def gradient_check(oracle, x, h):
    """Max absolute deviation between the analytic gradient and central
    differences of the value with step h."""
    x = as_point(x).coords
    n = oracle.dimension
    g = oracle.gradient(x)
    worst = 0.0
    for i in range(n):
        ei = np.zeros(n)
        ei[i] = h
        approx = (oracle.value(x + ei) - oracle.value(x - ei)) / (2.0 * h)
        worst = max(worst, abs(approx - g[i]))
    return worst
