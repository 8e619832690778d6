"""Moreau envelopes, proximal mappings and the envelope modulus sweep.

The envelope e_lam F(x) = inf_w { F(w) + ||w - x||^2 / (2 lam) } smooths
F from below while preserving its stationary structure; as lam drops to
0 the envelope KL modulus increases monotonically to the modulus of F.
For the smooth class the envelope modulus has the closed form

    min over positive eigenvalues t of the Hessian of
        sqrt( t / (2 (1 + lam t)) ),

which this module evaluates and sweeps.
"""

import math
from dataclasses import dataclass

import numpy as np

from . import numerics
from .certify import certify_smooth, _eig_classify
from .errors import ProxDiverged, SingularHessian, UnsupportedClass
from .model import (
    L1Regularized,
    LpLeastSquares,
    MaxOfSmooth,
    Quadratic,
    Smooth,
    SmoothOracle,
    as_point,
    evaluate,
)

_MONOTONE_SLACK = 1e-9


@dataclass(frozen=True)
class EnvelopeSweep:
    """Envelope moduli along a decreasing lambda ladder.

    moduli[k] is the KL modulus of e_{lambdas[k]} F at xbar with
    exponent 1/2; limit_modulus is the lambda -> 0 target (the modulus
    of F itself).
    """

    lambdas: tuple
    moduli: tuple
    limit_modulus: float

    def __post_init__(self):
        lams = tuple(float(v) for v in self.lambdas)
        mods = tuple(float(v) for v in self.moduli)
        if len(lams) != len(mods):
            raise ValueError("lambdas and moduli must have equal length")
        if any(l2 > l1 for l1, l2 in zip(lams, lams[1:])):
            raise ValueError("lambdas must be nonincreasing")
        for m1, m2 in zip(mods, mods[1:]):
            if m2 < m1 - _MONOTONE_SLACK:
                raise ValueError("moduli must be nondecreasing as lambda decreases")
        if mods and mods[-1] > self.limit_modulus + _MONOTONE_SLACK:
            raise ValueError("moduli must stay below the limit modulus")
        object.__setattr__(self, "lambdas", lams)
        object.__setattr__(self, "moduli", mods)
        object.__setattr__(self, "limit_modulus", float(self.limit_modulus))


def _prox_threshold_check(oracle, lam):
    """For quadratics, lam must stay below 1/rho with -rho the most
    negative eigenvalue, keeping the prox objective strongly convex."""
    if isinstance(oracle, Quadratic):
        values, _ = numerics.jacobi_eigen(oracle.Q)
        low = float(values[-1])
        if low < 0.0 and lam >= 1.0 / (-low):
            raise ProxDiverged(
                "lam=%g is not below the prox-regularity threshold %g" % (lam, 1.0 / (-low))
            )


def _prox_quadratic(oracle, x, lam):
    n = oracle.dimension
    a = np.eye(n) + lam * np.asarray(oracle.Q)
    return numerics.solve_linear(a, x - lam * oracle.c)


def _newton_local_min(value, gradient, hessian, w0, max_iter=200):
    """Damped Newton descent to a local minimizer; returns (w, ok)."""
    w = np.array(w0, dtype=np.float64)
    for _ in range(max_iter):
        g = gradient(w)
        gnorm = float(np.sqrt(g @ g))
        if gnorm < 1e-13:
            break
        h = hessian(w)
        try:
            step = numerics.solve_linear(h, g)
        except Exception:
            step = g
        if float(step @ g) <= 0.0:
            step = g
        t = 1.0
        base = value(w)
        moved = False
        for _bt in range(60):
            cand = w - t * step
            try:
                if value(cand) < base - 1e-16:
                    w = cand
                    moved = True
                    break
            except Exception:
                pass
            t *= 0.5
        if not moved:
            break
    g = gradient(w)
    return w, float(np.sqrt(g @ g)) < 1e-9


def _prox_smooth_general(oracle, x, lam):
    """Multistart damped Newton on f(w) + ||w - x||^2 / (2 lam)."""

    def val(w):
        return oracle.value(w) + float((w - x) @ (w - x)) / (2.0 * lam)

    def grad(w):
        return oracle.gradient(w) + (w - x) / lam

    def hess(w):
        return oracle.hessian(w) + np.eye(oracle.dimension) / lam

    n = oracle.dimension
    starts = [np.array(x)]
    for j in range(7):
        g = numerics.gaussians(0x9066, j, 0, n)
        starts.append(x + 0.05 * (1.0 + float(np.sqrt(x @ x))) * np.asarray(g))
    best = None
    for w0 in starts:
        try:
            w, ok = _newton_local_min(val, grad, hess, w0)
        except Exception:
            continue
        if not ok:
            continue
        hmin, _ = numerics.jacobi_eigen(hess(w))
        if float(hmin[-1]) <= 0.0:
            continue
        cand = (val(w), float(np.sqrt((w - x) @ (w - x))), w)
        if best is None or cand[0] < best[0] - 1e-14 or (
            abs(cand[0] - best[0]) <= 1e-14 and cand[1] < best[1]
        ):
            best = cand
    if best is None:
        raise ProxDiverged("no local prox point found within the iteration budget")
    return best[2]


def _soft_threshold(t, thr):
    if t > thr:
        return t - thr
    if t < -thr:
        return t + thr
    return 0.0


def _prox_l1_separable(f, x, lam):
    """Componentwise closed form for diagonal quadratic smooth parts."""
    q = np.diag(f.oracle.Q)
    c = f.oracle.c
    out = np.empty_like(x)
    for i in range(x.shape[0]):
        denom = 1.0 + lam * q[i]
        if denom <= 0.0:
            raise ProxDiverged("coordinate %d not prox-regular at lam=%g" % (i, lam))
        out[i] = _soft_threshold(x[i] - lam * c[i], lam * f.mu) / denom
    return out


def _prox_l1_general(f, x, lam):
    """Proximal-gradient iteration with a fixed step below 1/L."""
    h = f.oracle.hessian(x)
    values, _ = numerics.jacobi_eigen(h)
    lip = max(float(np.max(np.abs(values))), 0.0) + 1.0 / lam
    t = 1.0 / (lip * 1.01)
    w = np.array(x)
    for _ in range(20000):
        g = f.oracle.gradient(w) + (w - x) / lam
        w_new = np.array([_soft_threshold(w[i] - t * g[i], t * f.mu) for i in range(w.shape[0])])
        delta = float(np.max(np.abs(w_new - w)))
        w = w_new
        if delta < 1e-14:
            break
    return w


def _prox_max(f, x, lam):
    """Subgradient descent plus active-branch Newton polish."""

    def objective(w):
        return evaluate(f, w) + float((w - x) @ (w - x)) / (2.0 * lam)

    w = np.array(x, dtype=np.float64)
    best = objective(w)
    step = lam
    for _k in range(800):
        vals = [o.value(w) for o in f.oracles]
        i_star = max(range(len(vals)), key=lambda i: vals[i])
        g = f.oracles[i_star].gradient(w) + (w - x) / lam
        cand = w - step * g
        val = objective(cand)
        if val < best - 1e-16:
            w, best = cand, val
        else:
            step *= 0.5
            if step < 1e-14:
                break

    # polish: equalize the active branches and zero the weighted gradient
    vals = [o.value(w) for o in f.oracles]
    fmax = max(vals)
    tau = 1e-7 * (1.0 + abs(fmax))
    active = [i for i in range(len(vals)) if vals[i] >= fmax - tau]
    n = w.shape[0]
    k = len(active)
    theta = np.full(k, 1.0 / k)
    s = fmax
    for _newton in range(50):
        grads = [f.oracles[i].gradient(w) for i in active]
        hesss = [f.oracles[i].hessian(w) for i in active]
        res = np.zeros(n + k + 1)
        acc = (w - x) / lam
        for j in range(k):
            acc = acc + theta[j] * grads[j]
        res[:n] = acc
        for j in range(k):
            res[n + j] = f.oracles[active[j]].value(w) - s
        res[n + k] = float(np.sum(theta)) - 1.0
        if float(np.max(np.abs(res))) < 1e-13:
            break
        jac = np.zeros((n + k + 1, n + k + 1))
        hw = np.eye(n) / lam
        for j in range(k):
            hw = hw + theta[j] * hesss[j]
        jac[:n, :n] = hw
        for j in range(k):
            jac[:n, n + j] = grads[j]
            jac[n + j, :n] = grads[j]
            jac[n + j, n + k] = -1.0
            jac[n + k, n + j] = 1.0
        try:
            delta = numerics.solve_linear(jac, res)
        except Exception:
            break
        w = w - delta[:n]
        theta = theta - delta[n : n + k]
        s = s - delta[n + k]
    if bool(np.any(theta < -1e-8)):
        raise ProxDiverged("active-branch multipliers left the simplex")
    model = np.eye(n) / lam
    for j in range(k):
        model = model + theta[j] * f.oracles[active[j]].hessian(w)
    values, _ = numerics.jacobi_eigen(model)
    if float(values[-1]) <= 0.0:
        raise ProxDiverged("prox objective not locally strongly convex at the solution")
    return w


def _prox_lp(f, x, lam):
    """Support-pattern multistart for the lp least-squares prox."""

    def objective(w):
        return evaluate(f, w) + float((w - x) @ (w - x)) / (2.0 * lam)

    n = f.dimension

    def solve_on_support(support, w0):
        w = np.array(w0)
        for _ in range(100):
            ws = w[support]
            r = f.A[:, support] @ ws - f.b
            g = 2.0 * (f.A[:, support].T @ r)
            for local, i in enumerate(support):
                g[local] += f.mu * f.p * math.copysign(abs(w[i]) ** (f.p - 1.0), w[i])
                g[local] += (w[i] - x[i]) / lam
            if float(np.max(np.abs(g))) < 1e-13:
                break
            h = 2.0 * (f.A[:, support].T @ f.A[:, support]) + np.eye(len(support)) / lam
            for local, i in enumerate(support):
                h[local, local] += f.mu * f.p * (f.p - 1.0) * abs(w[i]) ** (f.p - 2.0)
            try:
                step = numerics.solve_linear(h, g)
            except Exception:
                break
            t = 1.0
            for _bt in range(50):
                cand = np.array(ws - t * step)
                if bool(np.all(np.abs(cand) > 1e-12)):
                    break
                t *= 0.5
            for local, i in enumerate(support):
                w[i] = ws[local] - t * step[local]
        return w

    candidates = [np.zeros(n)]
    supports = [tuple(i for i in range(n) if x[i] != 0.0)]
    supports.append(tuple(range(n)))
    for sup in dict.fromkeys(s for s in supports if s):
        w0 = np.array(x)
        for i in range(n):
            if i not in sup:
                w0[i] = 0.0
            elif w0[i] == 0.0:
                w0[i] = 1e-3
        candidates.append(solve_on_support(list(sup), w0))
    best = None
    for w in candidates:
        val = objective(w)
        dist = float(np.sqrt((w - x) @ (w - x)))
        if best is None or val < best[0] - 1e-14 or (abs(val - best[0]) <= 1e-14 and dist < best[1]):
            best = (val, dist, w)
    return best[2]


def prox(f, x, lam):
    """Proximal point of a structured function: the local minimizer of
    F(w) + ||w - x||^2 / (2 lam) nearest to x."""
    if not lam > 0:
        raise ProxDiverged("lam must be positive")
    x = as_point(x).coords
    if isinstance(f, SmoothOracle):
        f = Smooth(f)
    if isinstance(f, Smooth):
        _prox_threshold_check(f.oracle, lam)
        if isinstance(f.oracle, Quadratic):
            return _prox_quadratic(f.oracle, x, lam)
        return _prox_smooth_general(f.oracle, x, lam)
    if isinstance(f, L1Regularized):
        if isinstance(f.oracle, Quadratic):
            _prox_threshold_check(f.oracle, lam)
            q = np.asarray(f.oracle.Q)
            if float(np.max(np.abs(q - np.diag(np.diag(q))))) <= 1e-15:
                return _prox_l1_separable(f, x, lam)
        return _prox_l1_general(f, x, lam)
    if isinstance(f, MaxOfSmooth):
        return _prox_max(f, x, lam)
    if isinstance(f, LpLeastSquares):
        return _prox_lp(f, x, lam)
    raise UnsupportedClass("no proximal rule for %r" % type(f).__name__)


def envelope(f, x, lam):
    """Moreau envelope value e_lam F(x) = F(prox) + ||prox - x||^2/(2 lam)."""
    x = as_point(x).coords
    p = prox(f, x, lam)
    if isinstance(f, SmoothOracle):
        fval = f.value(p)
    else:
        fval = evaluate(f, p)
    d = p - x
    return fval + float(d @ d) / (2.0 * lam)


def envelope_modulus_smooth(hessian, lam):
    """Envelope KL modulus for the smooth class via the closed form
    min over positive eigenvalues t of sqrt(t / (2 (1 + lam t)))."""
    hessian = np.asarray(hessian, dtype=np.float64)
    values, _ = numerics.jacobi_eigen(hessian)
    _, thr = _eig_classify(values)
    if bool(np.any(np.abs(values) <= thr)):
        raise SingularHessian("envelope modulus needs a nonsingular Hessian")
    best = math.inf
    for i in range(values.shape[0]):
        t = float(values[i])
        if t > thr:
            best = min(best, math.sqrt(t / (2.0 * (1.0 + lam * t))))
    return best


def sweep(f, xbar, lambdas):
    """Envelope-modulus sweep for a certified smooth function.

    lambdas are sorted into decreasing order; the sweep asserts monotone
    nondecrease of the moduli as lambda drops, convergence to the
    certified limit within limit * lam_last * spectral_radius, and
    returns an EnvelopeSweep.
    """
    if isinstance(f, Smooth):
        oracle = f.oracle
    elif isinstance(f, SmoothOracle):
        oracle = f
    else:
        raise UnsupportedClass("envelope sweep supports the smooth class only")
    x = as_point(xbar).coords
    cert = certify_smooth(oracle, x)
    limit = cert.modulus
    lams = sorted((float(l) for l in lambdas), reverse=True)
    if any(l <= 0 for l in lams):
        raise ProxDiverged("lambda values must be positive")
    h = oracle.hessian(x)
    moduli = [envelope_modulus_smooth(h, l) for l in lams]
    out = EnvelopeSweep(tuple(lams), tuple(moduli), limit)
    if lams and math.isfinite(limit):
        values, _ = numerics.jacobi_eigen(h)
        radius = float(np.max(np.abs(values)))
        bound = limit * lams[-1] * radius
        if abs(moduli[-1] - limit) > bound + 1e-12:
            raise AssertionError(
                "sweep failed to converge: |%.17g - %.17g| > %.3e"
                % (moduli[-1], limit, bound)
            )
    return out
