"""Certificates of the KL property with exponent 1/2.

Each supported class reduces the nonsingularity of the subgradient
graphical derivative at (xbar, 0), and the exact KL modulus, to finite
computations:

* smooth: eigenvalues of the Hessian; modulus sqrt(lambda_min^+ / 2)
  over positive eigenvalues, infinite when none exist.
* max of smooth: a constrained ratio program over the unit sphere
  intersected with the cone of first-order-flat directions, with a
  per-direction inner linear program over the multiplier polytope and
  a min-norm computation over the resulting polytope-plus-cone.
* l1 regularized: the four index sets I / J / K+ / K- reduce the
  program to the J-block Hessian when K+ and K- are empty, and to a
  complementarity-pattern search otherwise.
* lp least squares: restriction to the support of xbar, then the
  smooth reduction on that block.

A certificate quotes the modulus as the square root of the optimal
value it computed, carries a witness direction when one exists, and is
cross-validated against the sampling oracle elsewhere in the suite.
"""

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from . import numerics, subdiff
from ._parallel import run_ordered
from .errors import (
    DimensionMismatch,
    NotStationary,
    PatternExplosion,
    SingularHessian,
    UnsupportedClass,
)
from .model import L1Regularized, LpLeastSquares, MaxOfSmooth, Smooth, as_point

KL_HOLDS_HALF = "KL_HOLDS_HALF"
KL_HOLDS_ZERO_NOT_SHARP = "KL_HOLDS_ZERO_NOT_SHARP"
NOT_CERTIFIED = "NOT_CERTIFIED"

STATIONARITY_TOL = 1e-8
_POS_EIG_REL = 1e-10
_N_MULTISTART = 64
_KAPPA_TOL = 1e-9


@dataclass(frozen=True)
class KLCertificate:
    """Outcome of a certification request.

    modulus is +inf when no direction of finite positive curvature
    exists (the value gap then vanishes or grows super-quadratically on
    every approach from above).
    """

    verdict: str
    modulus: float
    sharp: bool
    witness_w: object = None
    diagnostics: tuple = field(default_factory=tuple)
    kkt: object = None

    def __post_init__(self):
        if self.verdict == KL_HOLDS_HALF and not self.modulus > 0.0:
            raise AssertionError("KL_HOLDS_HALF requires a positive modulus")
        if self.sharp and self.witness_w is None:
            raise AssertionError("sharp certificates carry a witness direction")


@dataclass(frozen=True)
class MaxKKTPoint:
    """A (kappa, lambda, beta, w, z) tuple for the max-class systems.

    lambda and beta are indexed over the full member list; entries off
    the active set are zero.  kappa equals the second-order model value
    in direction w when the residuals vanish.
    """

    kappa: float
    lam: np.ndarray
    beta: np.ndarray
    w: np.ndarray
    z: np.ndarray

    def residual(self, gradients, hessians, active):
        """Max violation of the multiplier, sign and complementarity
        conditions over the active set."""
        r = abs(float(np.sum(self.lam)) - 1.0)
        n = self.w.shape[0]
        acc = np.zeros(n)
        for i in active:
            acc = acc + self.lam[i] * gradients[i]
        r = max(r, float(np.max(np.abs(acc))) if n else 0.0)
        for i in active:
            gi = gradients[i]
            hi = hessians[i]
            slope = float(gi @ self.w)
            bracket = self.kappa - float(gi @ self.z) - float(self.w @ hi @ self.w)
            r = max(r, -float(self.beta[i]), -float(self.lam[i]))
            r = max(r, slope, -bracket)
            r = max(r, abs(float(self.beta[i]) * slope))
            r = max(r, abs(float(self.lam[i]) * bracket))
        return r


def _eig_classify(values):
    """(radius, positive-threshold) for an eigenvalue vector."""
    radius = float(np.max(np.abs(values))) if values.size else 0.0
    thr = _POS_EIG_REL * max(1.0, radius)
    return radius, thr


def modulus_from_curvature(hessian):
    """KL modulus at 0 of the quadratic model w -> (1/2) <H w, w>.

    Returns (modulus, witness, lambda_min_plus).  The modulus is
    sqrt(lambda_min^+ / 2) over positive eigenvalues and +inf when H
    has none; the witness is the eigenvector of lambda_min^+ (first in
    the descending eigen ordering among ties).
    """
    values, vectors = numerics.jacobi_eigen(np.asarray(hessian, dtype=np.float64))
    _, thr = _eig_classify(values)
    candidates = [i for i in range(values.shape[0]) if values[i] > thr]
    if not candidates:
        return math.inf, None, None
    lam_min = min(float(values[i]) for i in candidates)
    tie = lam_min + 1e-12 * max(1.0, abs(lam_min))
    chosen = min(i for i in candidates if values[i] <= tie)
    witness = np.array(vectors[:, chosen])
    return math.sqrt(lam_min / 2.0), witness, lam_min


def _certify_from_hessian(hessian, diagnostics, embed=None, n_full=None):
    """Shared smooth-style classification of a (sub)Hessian block."""
    hessian = np.asarray(hessian, dtype=np.float64)
    values, _ = numerics.jacobi_eigen(hessian)
    radius, thr = _eig_classify(values)
    if bool(np.any(np.abs(values) <= thr)):
        raise SingularHessian(
            "Hessian block numerically singular (|eig| <= %.3e); analytic "
            "certificate unavailable, use the sampling oracle" % thr
        )
    if bool(np.all(values < 0.0)):
        diag = diagnostics + (
            "all eigenvalues negative: strict local maximum, no approach from "
            "above exists; KL holds with exponent 0 and is not sharp",
        )
        return KLCertificate(KL_HOLDS_ZERO_NOT_SHARP, math.inf, False, None, diag)
    modulus, witness, lam_min = modulus_from_curvature(hessian)
    if embed is not None and witness is not None:
        w_full = np.zeros(n_full)
        for local, g in enumerate(embed):
            w_full[g] = witness[local]
        witness = w_full
    diag = diagnostics + ("smallest positive eigenvalue %.17g" % lam_min,)
    return KLCertificate(KL_HOLDS_HALF, modulus, True, witness, diag)


def certify_smooth(oracle, xbar, tol=STATIONARITY_TOL):
    """Certificate for a C^2 function at a stationary point with a
    nonsingular Hessian."""
    x = as_point(xbar).coords
    g = oracle.gradient(x)
    gnorm = float(np.sqrt(np.dot(g, g)))
    if gnorm > tol:
        raise NotStationary("gradient norm %.3e exceeds tol %.1e" % (gnorm, tol))
    h = oracle.hessian(x)
    return _certify_from_hessian(h, ("class: smooth",))


def certify_lp(f, xbar, tol=STATIONARITY_TOL):
    """Certificate for an lp-regularized least squares function.

    At xbar = 0 every approach from above has diverging subgradient
    distance, so KL holds with exponent 0 (not sharp).  Otherwise the
    problem restricts to the support of xbar, which is smooth there.
    """
    if not isinstance(f, LpLeastSquares):
        raise UnsupportedClass("LpLeastSquares expected")
    x = as_point(xbar).coords
    if x.shape[0] != f.dimension:
        raise DimensionMismatch("point dimension %d" % x.shape[0])
    support = [i for i in range(x.shape[0]) if x[i] != 0.0]
    if not support:
        return KLCertificate(
            KL_HOLDS_ZERO_NOT_SHARP,
            math.inf,
            False,
            None,
            (
                "class: lp least squares, xbar = 0",
                "the |x_i|^p terms make the subgradient distance diverge on "
                "every approach from above: KL holds with exponent 0, not sharp",
            ),
        )
    a_i = f.A[:, support]
    x_i = x[support]
    grad = 2.0 * (a_i.T @ (a_i @ x_i - f.b))
    for local, i in enumerate(support):
        grad[local] += f.mu * f.p * math.copysign(abs(x[i]) ** (f.p - 1.0), x[i])
    gnorm = float(np.sqrt(np.dot(grad, grad)))
    if gnorm > tol:
        raise NotStationary("restricted gradient norm %.3e exceeds tol %.1e" % (gnorm, tol))
    h_i = 2.0 * (a_i.T @ a_i)
    for local, i in enumerate(support):
        h_i[local, local] += f.mu * f.p * (f.p - 1.0) * abs(x[i]) ** (f.p - 2.0)
    diag = ("class: lp least squares, support size %d" % len(support),)
    return _certify_from_hessian(h_i, diag, embed=support, n_full=x.shape[0])


# ---------------------------------------------------------------------------
# l1 regularized functions


def _sign_project_l1(w, zero_idx, kplus_free, kminus_free):
    """Exact projection onto the l1 pattern cone intersected with the
    sphere; returns None when the projection collapses to 0."""
    w = np.array(w)
    for i in zero_idx:
        w[i] = 0.0
    for i in kplus_free:
        if w[i] > 0.0:
            w[i] = 0.0
    for i in kminus_free:
        if w[i] < 0.0:
            w[i] = 0.0
    norm = float(np.sqrt(np.dot(w, w)))
    if norm < 1e-12:
        return None
    return w / norm


def _compass_minimize(objective, project, w0, coords, max_rounds=500):
    """Deterministic compass search on the projected sphere.

    Moves along +-e_i for i in coords, projecting each candidate; the
    step halves when no move improves, down to 1e-12 within at most
    max_rounds sweeps.  Returns (w, value).
    """
    w = project(w0)
    if w is None:
        return None, math.inf
    best = objective(w)
    step = 0.25
    rounds = 0
    while step > 1e-12 and rounds < max_rounds:
        rounds += 1
        improved = False
        for i in coords:
            for sgn in (1.0, -1.0):
                cand = np.array(w)
                cand[i] += sgn * step
                cand = project(cand)
                if cand is None:
                    continue
                val = objective(cand)
                if val < best - 1e-15 * max(1.0, abs(best)):
                    w = cand
                    best = val
                    improved = True
        if not improved:
            step *= 0.5
    return w, best


def _multistart_minimize(objective, project, seeds, coords, n, stream):
    """Multistart compass search: structured seeds plus deterministic
    random sphere starts; returns the best (w, value)."""
    starts = list(seeds)
    need = max(0, _N_MULTISTART - len(starts))
    for j in range(need):
        g = numerics.gaussians(0x5EED, stream + j, 0, n)
        starts.append(np.asarray(g))

    def one(start):
        return _compass_minimize(objective, project, start, coords)

    results = run_ordered(one, starts)
    best_w, best_val = None, math.inf
    for w, val in results:
        if w is not None and val < best_val:
            best_w, best_val = w, val
    return best_w, best_val


def _l1_nonsingularity_witness(h, part, n):
    """Search (tjb) pattern systems for a nonzero direction; returns a
    unit witness or None when every pattern admits only w = 0."""
    kk = sorted(part.Kplus | part.Kminus)
    jj = sorted(part.J)
    for assign in itertools.product((0, 1), repeat=len(kk)):
        free = [kk[t] for t in range(len(kk)) if assign[t] == 1]
        zero = [kk[t] for t in range(len(kk)) if assign[t] == 0]
        supp = jj + free
        if not supp:
            continue
        eq_rows = [h[j, supp] for j in jj + free]
        e_mat = np.array(eq_rows).reshape(len(jj + free), len(supp))
        kernel = numerics.null_space(e_mat, 1e-10)
        if kernel.shape[1] == 0:
            continue
        # inequality rows C w_supp <= 0 in support coordinates
        c_rows = []
        for j in free:
            row = np.zeros(len(supp))
            row[supp.index(j)] = 1.0 if j in part.Kplus else -1.0
            c_rows.append(row)
        for j in zero:
            sgn = 1.0 if j in part.Kplus else -1.0
            c_rows.append(sgn * h[j, supp])
        w_local = _nonzero_in_cone(kernel, c_rows)
        if w_local is not None:
            w = np.zeros(n)
            for local, g in enumerate(supp):
                w[g] = w_local[local]
            return w / float(np.sqrt(np.dot(w, w)))
    return None


def _nonzero_in_cone(kernel, c_rows):
    """Nonzero point of {N y : C N y <= 0}, or None.

    Solved by small LPs: maximize each +-y_t inside the box [-1, 1]^k
    subject to the cone rows (slack variables make them equalities).
    """
    k = kernel.shape[1]
    if not c_rows:
        return kernel[:, 0]
    cn = np.array([row @ kernel for row in c_rows])
    m = cn.shape[0]
    a_eq = np.hstack([cn, np.eye(m)])
    b_eq = np.zeros(m)
    bounds = [(-1.0, 1.0)] * k + [(0.0, math.inf)] * m
    for t in range(k):
        for sgn in (1.0, -1.0):
            c_obj = np.zeros(k + m)
            c_obj[t] = -sgn
            res = numerics.solve_lp(c_obj, a_eq, b_eq, bounds)
            if res.status == numerics.OPTIMAL and res.value < -1e-7:
                y = res.x[:k]
                w = kernel @ y
                if float(np.sqrt(np.dot(w, w))) > 1e-9:
                    return w
    return None


def certify_l1(f, xbar, tol=STATIONARITY_TOL):
    """Certificate for f + mu ||.||_1 at a stationary point."""
    if not isinstance(f, L1Regularized):
        raise UnsupportedClass("L1Regularized expected")
    x = as_point(xbar).coords
    part = subdiff.classify_l1_indices(f, x, tol)
    n = x.shape[0]
    h = f.oracle.hessian(x)
    jj = sorted(part.J)
    diag = (
        "class: l1 regularized",
        "index sets |I|=%d |J|=%d |K+|=%d |K-|=%d" % (len(part.I), len(jj), len(part.Kplus), len(part.Kminus)),
    )

    if part.ri_case:
        diag = diag + ("K+ and K- empty: reduction to the J-block Hessian",)
        if not jj:
            return KLCertificate(
                KL_HOLDS_HALF,
                math.inf,
                False,
                None,
                diag + ("J empty: the l1 term dominates every direction, first-order growth",),
            )
        h_jj = h[np.ix_(jj, jj)]
        values, _ = numerics.jacobi_eigen(h_jj)
        _, thr = _eig_classify(values)
        if bool(np.any(np.abs(values) <= thr)):
            kernel = numerics.null_space(h_jj, 1e-9)
            witness = np.zeros(n)
            if kernel.shape[1]:
                for local, g in enumerate(jj):
                    witness[g] = kernel[local, 0]
            return KLCertificate(
                NOT_CERTIFIED,
                0.0,
                False,
                witness,
                diag + ("J-block Hessian singular: nonsingularity fails",),
            )
        modulus, witness_local, lam_min = modulus_from_curvature(h_jj)
        if witness_local is None:
            if not part.I:
                # every coordinate is active with negative curvature: the
                # function is smooth near xbar and strictly locally maximal
                return KLCertificate(
                    KL_HOLDS_ZERO_NOT_SHARP,
                    math.inf,
                    False,
                    None,
                    diag + ("J covers all coordinates with a negative definite "
                            "block: strict local maximum",),
                )
            return KLCertificate(
                KL_HOLDS_HALF,
                math.inf,
                False,
                None,
                diag + ("J-block negative definite but the inactive coordinates "
                        "grow at first order: modulus unbounded",),
            )
        witness = np.zeros(n)
        for local, g in enumerate(jj):
            witness[g] = witness_local[local]
        return KLCertificate(
            KL_HOLDS_HALF,
            modulus,
            True,
            witness,
            diag + ("smallest positive eigenvalue of the J block %.17g" % lam_min,),
        )

    kk = sorted(part.Kplus | part.Kminus)
    if len(kk) > 20:
        raise PatternExplosion("|K+ u K-| = %d exceeds the enumeration cap" % len(kk))

    witness = _l1_nonsingularity_witness(h, part, n)
    if witness is not None:
        return KLCertificate(
            NOT_CERTIFIED,
            0.0,
            False,
            witness,
            diag + ("nonsingularity fails along the witness direction",),
        )

    value, w_star, kappa_best = _l1_ratio_minimum(h, part, n)
    sharp = kappa_best > _KAPPA_TOL
    diag = diag + ("pattern search over %d complementarity patterns" % (2 ** len(kk)),)
    if value is None or not math.isfinite(value):
        return KLCertificate(
            KL_HOLDS_HALF,
            math.inf,
            False,
            None,
            diag + ("no direction with positive model curvature: modulus unbounded",),
        )
    return KLCertificate(KL_HOLDS_HALF, math.sqrt(value), sharp, w_star, diag)


def _l1_ratio_minimum(h, part, n):
    """Minimize (1/2)||v(w)||^2 / <v(w), w> over the pattern cones.

    v is pinned to the Hessian image on coordinates where w is free and
    clamped to its minimal-norm feasible value where w is zero.
    Returns (min value or None, argmin w, best curvature seen).
    """
    kk = sorted(part.Kplus | part.Kminus)
    jj = sorted(part.J)
    best_val = math.inf
    best_w = None
    best_kappa = -math.inf
    stream_tag = 1 << 40

    for pat_idx, assign in enumerate(itertools.product((0, 1), repeat=len(kk))):
        free = [kk[t] for t in range(len(kk)) if assign[t] == 1]
        zero = sorted(set(range(n)) - set(jj) - set(free))
        supp = jj + free
        if not supp:
            continue
        kplus_free = [j for j in free if j in part.Kplus]
        kminus_free = [j for j in free if j in part.Kminus]

        def objective(w):
            hw = h @ w
            denom = float(w @ hw)
            if denom <= 1e-14:
                return math.inf
            num = 0.0
            for j in range(n):
                if w[j] != 0.0 or (j in part.J):
                    num += hw[j] * hw[j]
                elif j in part.Kplus:
                    num += max(hw[j], 0.0) ** 2
                elif j in part.Kminus:
                    num += min(hw[j], 0.0) ** 2
            return 0.5 * num / denom

        def project(w, _zero=zero, _kp=kplus_free, _km=kminus_free):
            return _sign_project_l1(w, _zero, _kp, _km)

        seeds = []
        h_ss = h[np.ix_(supp, supp)]
        _, vecs = numerics.jacobi_eigen(h_ss)
        for col in range(len(supp)):
            for sgn in (1.0, -1.0):
                w = np.zeros(n)
                for local, g in enumerate(supp):
                    w[g] = sgn * vecs[local, col]
                seeds.append(w)
        w_star, val = _multistart_minimize(
            objective, project, seeds, supp, n, stream_tag + pat_idx * _N_MULTISTART
        )
        if w_star is not None:
            kappa = float(w_star @ h @ w_star)
            if kappa > best_kappa:
                best_kappa = kappa
            if val < best_val:
                best_val = val
                best_w = w_star
    if best_w is None or not math.isfinite(best_val):
        return None, None, best_kappa
    return best_val, best_w, best_kappa


# ---------------------------------------------------------------------------
# max of smooth functions


def _lambda_vertices(gradients, m):
    """Vertices of {lambda >= 0, sum lambda = 1, sum lambda_i g_i = 0}
    by support enumeration (desk scale: m <= 12)."""
    n = gradients[0].shape[0]
    a_full = np.zeros((n + 1, m))
    a_full[0, :] = 1.0
    for i, g in enumerate(gradients):
        a_full[1:, i] = g
    b = np.zeros(n + 1)
    b[0] = 1.0
    scale = max(1.0, float(np.max(np.abs(a_full))))
    vertices = []
    seen = set()
    max_support = min(m, n + 1)
    for size in range(1, max_support + 1):
        for supp in itertools.combinations(range(m), size):
            a_s = a_full[:, supp]
            gram = a_s.T @ a_s
            rhs = a_s.T @ b
            try:
                lam_s = numerics.solve_linear(gram, rhs)
            except Exception:
                continue
            resid = a_s @ lam_s - b
            if float(np.max(np.abs(resid))) > 1e-9 * scale:
                continue
            if bool(np.any(lam_s < -1e-10)):
                continue
            lam = np.zeros(m)
            for local, g in enumerate(supp):
                lam[g] = max(float(lam_s[local]), 0.0)
            key = tuple(round(float(v), 9) for v in lam)
            if key not in seen:
                seen.add(key)
                vertices.append(lam)
    return vertices


def _coordinate_nnls(p0, gens, beta0=None):
    """min ||p0 + sum beta_j g_j|| over beta >= 0 by cyclic coordinate
    descent with exact one-dimensional minimizers."""
    k = len(gens)
    beta = np.zeros(k) if beta0 is None else np.array(beta0)
    r = np.array(p0)
    for j in range(k):
        if beta[j] != 0.0:
            r = r + beta[j] * gens[j]
    gg = [float(g @ g) for g in gens]
    for _ in range(200):
        changed = 0.0
        for j in range(k):
            if gg[j] <= 1e-300:
                continue
            step = float(gens[j] @ r) / gg[j]
            new = max(beta[j] - step, 0.0)
            delta = new - beta[j]
            if delta != 0.0:
                r = r + delta * gens[j]
                beta[j] = new
                changed = max(changed, abs(delta))
        if changed < 1e-14:
            break
    return beta, r


def _min_norm_polytope_cone(points, gens):
    """min || conv(points) + cone(gens) || by alternating a Wolfe step
    over the shifted polytope with an NNLS step over the cone.

    Returns (v, theta, beta): v the minimizer, theta simplex weights
    over points, beta nonnegative cone coefficients.
    """
    pts = np.asarray(points, dtype=np.float64)
    m = pts.shape[0]
    if not gens:
        v, theta = numerics.min_norm_point(pts)
        return v, theta, np.zeros(0)
    beta = np.zeros(len(gens))
    theta = np.full(m, 1.0 / m)
    prev = math.inf
    v = pts.T @ theta
    for _ in range(100):
        shift = np.zeros(pts.shape[1])
        for j in range(len(gens)):
            if beta[j] != 0.0:
                shift = shift + beta[j] * gens[j]
        v_p, theta = numerics.min_norm_point(pts + shift)
        p0 = v_p - shift
        beta, v = _coordinate_nnls(p0, gens, beta)
        cur = float(v @ v)
        if prev - cur < 1e-15 * max(1.0, cur):
            break
        prev = cur
    return v, theta, beta


class _MaxProgram:
    """Per-direction evaluations for the max class: feasibility in the
    flat cone, the model curvature kappa(w) and the distance to the
    graphical-derivative image."""

    def __init__(self, gradients, hessians):
        self.gradients = list(gradients)
        self.hessians = list(hessians)
        self.m = len(gradients)
        self.n = gradients[0].shape[0]
        gnorm = max([float(np.sqrt(g @ g)) for g in gradients] + [0.0])
        self.act_tol = 1e-9 * (1.0 + gnorm)
        self.vertices = _lambda_vertices(self.gradients, self.m)
        self.nontrivial_gradients = [
            g for g in self.gradients if float(np.sqrt(g @ g)) > self.act_tol
        ]

    def project_cone_sphere(self, w):
        w = np.array(w, dtype=np.float64)
        for _ in range(200):
            worst = 0.0
            for g in self.nontrivial_gradients:
                s = float(g @ w)
                if s > worst:
                    worst = s
                if s > 1e-13:
                    w = w - (s / float(g @ g)) * g
            if worst <= 1e-13:
                break
        norm = float(np.sqrt(w @ w))
        if norm < 1e-9:
            return None
        return w / norm

    def kappa(self, w):
        """max over multiplier vertices of the lambda-weighted curvature,
        with the attaining vertex set."""
        q = [float(w @ h @ w) for h in self.hessians]
        best = -math.inf
        for lam in self.vertices:
            val = 0.0
            for i in range(self.m):
                if lam[i] != 0.0:
                    val += lam[i] * q[i]
            if val > best:
                best = val
        scale = max(1.0, abs(best))
        face = [lam for lam in self.vertices if _lam_value(lam, q) >= best - 1e-10 * scale]
        return best, face

    def distance_sq(self, w):
        """(d(0, D(w))^2, kappa(w), lambda, beta, v) for w in the cone."""
        for g in self.gradients:
            if float(g @ w) > self.act_tol:
                return None
        kappa, face = self.kappa(w)
        points = []
        for lam in face:
            p = np.zeros(self.n)
            for i in range(self.m):
                if lam[i] != 0.0:
                    p = p + lam[i] * (self.hessians[i] @ w)
            points.append(p)
        active_idx = [
            i for i in range(self.m) if abs(float(self.gradients[i] @ w)) <= self.act_tol
        ]
        gens = [
            self.gradients[i]
            for i in active_idx
            if float(self.gradients[i] @ self.gradients[i]) > self.act_tol**2
        ]
        gen_members = [
            i for i in active_idx if float(self.gradients[i] @ self.gradients[i]) > self.act_tol**2
        ]
        v, theta, beta = _min_norm_polytope_cone(np.array(points), gens)
        lam = np.zeros(self.m)
        for j, lam_vertex in enumerate(face):
            lam = lam + theta[j] * lam_vertex
        beta_full = np.zeros(self.m)
        for j, i in enumerate(gen_members):
            beta_full[i] += beta[j]
        return float(v @ v), kappa, lam, beta_full, v


def _lam_value(lam, q):
    val = 0.0
    for i in range(len(q)):
        if lam[i] != 0.0:
            val += lam[i] * q[i]
    return val


def _max_structured_seeds(prog):
    """Deterministic starts: coordinate axes, cone-kernel directions and
    vertex-averaged Hessian eigenvectors."""
    seeds = []
    n = prog.n
    for i in range(n):
        e = np.zeros(n)
        e[i] = 1.0
        seeds.append(e)
        seeds.append(-e)
    if prog.nontrivial_gradients:
        g_mat = np.array(prog.nontrivial_gradients)
        kernel = numerics.null_space(g_mat, 1e-10)
        for col in range(kernel.shape[1]):
            seeds.append(np.array(kernel[:, col]))
            seeds.append(-np.array(kernel[:, col]))
    for lam in prog.vertices:
        h_bar = np.zeros((n, n))
        for i in range(prog.m):
            if lam[i] != 0.0:
                h_bar = h_bar + lam[i] * prog.hessians[i]
        _, vecs = numerics.jacobi_eigen(h_bar)
        for col in range(n):
            seeds.append(np.array(vecs[:, col]))
            seeds.append(-np.array(vecs[:, col]))
    return seeds


def certify_max(f, xbar, tol=STATIONARITY_TOL):
    """Certificate for the pointwise max of C^2 functions."""
    if not isinstance(f, MaxOfSmooth):
        raise UnsupportedClass("MaxOfSmooth expected")
    x = as_point(xbar).coords
    if not subdiff.is_stationary(f, x, tol):
        raise NotStationary("0 is not in the subdifferential within tol")
    data = subdiff.active_set(f, x)
    m = len(data.active)
    if m > 12:
        raise PatternExplosion("|I(xbar)| = %d exceeds the enumeration cap" % m)
    gradients = [np.asarray(g, dtype=np.float64) for g in data.gradients]
    hessians = [np.asarray(h, dtype=np.float64) for h in data.hessians]
    diag = ("class: max of smooth, active branches %d" % m,)

    gnorm = max(float(np.sqrt(g @ g)) for g in gradients)
    if gnorm <= tol:
        # all active gradients vanish; identical Hessians reduce to the
        # smooth case exactly
        same = all(
            float(np.max(np.abs(h - hessians[0]))) <= 1e-12 * max(1.0, float(np.max(np.abs(hessians[0]))))
            for h in hessians[1:]
        )
        if same:
            return _certify_from_hessian(
                hessians[0], diag + ("degenerate active set: single quadratic model",)
            )

    prog = _MaxProgram(gradients, hessians)
    if not prog.vertices:
        raise NotStationary("multiplier polytope is empty")
    seeds = _max_structured_seeds(prog)

    def nonsing_objective(w):
        out = prog.distance_sq(w)
        if out is None:
            return math.inf
        return 0.5 * out[0]

    w_bad, phi_min = _multistart_minimize(
        nonsing_objective, prog.project_cone_sphere, seeds, list(range(prog.n)), prog.n, 1 << 41
    )
    scale_h = max([1.0] + [float(np.max(np.abs(h))) for h in hessians])
    nonsing_tol = 1e-9 * scale_h * scale_h
    if w_bad is not None and phi_min <= nonsing_tol:
        return KLCertificate(
            NOT_CERTIFIED,
            0.0,
            False,
            w_bad,
            diag + ("nonsingularity fails: flat direction with vanishing derivative image",),
        )
    diag = diag + ("nonsingularity margin %.3e over %d starts" % (phi_min, _N_MULTISTART),)

    def ratio_objective(w):
        out = prog.distance_sq(w)
        if out is None:
            return math.inf
        dist_sq, kappa, _lam, _beta, _v = out
        if kappa <= _KAPPA_TOL:
            return math.inf
        return 0.5 * dist_sq / kappa

    w_star, rho_min = _multistart_minimize(
        ratio_objective, prog.project_cone_sphere, seeds, list(range(prog.n)), prog.n, 1 << 42
    )
    kappa_best = _max_curvature_probe(prog, seeds, w_star)
    sharp = kappa_best > _KAPPA_TOL
    if not math.isfinite(rho_min):
        if gnorm <= tol and kappa_best < -_KAPPA_TOL:
            # every direction is flat to first order and curves downward:
            # a strict local maximum, so no approach from above exists
            return KLCertificate(
                KL_HOLDS_ZERO_NOT_SHARP,
                math.inf,
                False,
                None,
                diag + ("all model curvatures negative: strict local maximum, KL "
                        "holds with exponent 0 and is not sharp",),
            )
        return KLCertificate(
            KL_HOLDS_HALF,
            math.inf,
            False,
            None,
            diag + ("no flat direction has positive model curvature: the value gap "
                    "grows at first order, modulus unbounded",),
        )
    out = prog.distance_sq(w_star)
    _, kappa, lam, beta, v = out
    z = _max_dual_z(prog, w_star, kappa)
    lam_full = np.zeros(len(f.oracles))
    beta_full = np.zeros(len(f.oracles))
    for local, i in enumerate(data.active):
        lam_full[i] = lam[local]
        beta_full[i] = beta[local]
    kkt = MaxKKTPoint(kappa, lam_full, beta_full, np.array(w_star), z)
    witness = np.array(w_star) if sharp else None
    diag = diag + ("ratio program minimum %.17g at curvature %.17g" % (rho_min, kappa),)
    if kappa < 1e-6 * max(kappa_best, 1e-6):
        diag = diag + (
            "minimizing curvature is near the feasibility boundary: the "
            "reported value is the infimum and may not be attained",
        )
    if not sharp:
        diag = diag + ("no positive-curvature probe found: sharpness not established",)
    return KLCertificate(KL_HOLDS_HALF, math.sqrt(rho_min), sharp, witness, diag, kkt=kkt)


def _max_curvature_probe(prog, seeds, w_star):
    """Largest model curvature kappa(w) over a deterministic probe set
    (structured seeds, a fixed direction batch, and the ratio-program
    minimizer); used for the sharpness verdict."""
    probes = list(seeds)
    if w_star is not None:
        probes.append(np.array(w_star))
    for j in range(256):
        probes.append(np.asarray(numerics.gaussians(0xCA99, (1 << 43) + j, 0, prog.n)))
    best = -math.inf
    for w0 in probes:
        w = prog.project_cone_sphere(w0)
        if w is None:
            continue
        kappa, _ = prog.kappa(w)
        if kappa > best:
            best = kappa
    return best


def _max_dual_z(prog, w, kappa):
    """Dual certificate z of the per-direction linear program, chosen so
    the bracket terms kappa - <g_i, z> - <H_i w, w> are feasible."""
    m = prog.m
    q = np.array([float(w @ h @ w) for h in prog.hessians])
    a_eq = np.zeros((prog.n + 1, m))
    a_eq[0, :] = 1.0
    for i, g in enumerate(prog.gradients):
        a_eq[1:, i] = g
    b_eq = np.zeros(prog.n + 1)
    b_eq[0] = 1.0
    res = numerics.solve_lp(-q, a_eq, b_eq, [(0.0, math.inf)] * m)
    if res.status != numerics.OPTIMAL or res.duals is None:
        return np.zeros(prog.n)
    duals = res.duals
    for sgn in (-1.0, 1.0):
        z = sgn * duals[1:]
        ok = True
        for i in range(m):
            if kappa - float(prog.gradients[i] @ z) - q[i] < -1e-7:
                ok = False
                break
        if ok:
            return np.asarray(z)
    return np.zeros(prog.n)


# ---------------------------------------------------------------------------
# growth-condition report for the smooth class


@dataclass(frozen=True)
class GrowthConditionReport:
    """Equivalent second-order growth conditions at a smooth stationary
    point, plus the one-way nonsingularity consequence."""

    quadratic_growth: bool
    curvature_positive: bool
    sublevel_bounded: bool
    derivative_positive_definite: bool
    nonsingular: bool
    chain_consistent: bool


def growth_conditions(oracle, xbar, tol=STATIONARITY_TOL):
    """Evaluate the growth/nonsingularity condition chain for a C^2
    function at a stationary point."""
    x = as_point(xbar).coords
    g = oracle.gradient(x)
    if float(np.sqrt(g @ g)) > tol:
        raise NotStationary("gradient norm exceeds tol")
    h = oracle.hessian(x)
    values, vectors = numerics.jacobi_eigen(h)
    _, thr = _eig_classify(values)
    positive_definite = bool(np.all(values > thr))
    nonsingular = bool(np.all(np.abs(values) > thr))

    # sampled probe of the quadratic model: min curvature over a
    # deterministic direction grid must agree in sign with the spectrum
    n = x.shape[0]
    min_probe = math.inf
    for j in range(100):
        d = numerics.gaussians(0xC0DE, j, 0, n)
        norm = float(np.sqrt(d @ d))
        if norm < 1e-12:
            continue
        d = d / norm
        min_probe = min(min_probe, float(d @ h @ d))
    for col in range(n):
        d = vectors[:, col]
        min_probe = min(min_probe, float(d @ h @ d))
    quadratic_growth = positive_definite and min_probe > 0.0

    report = GrowthConditionReport(
        quadratic_growth=quadratic_growth,
        curvature_positive=positive_definite,
        sublevel_bounded=positive_definite,
        derivative_positive_definite=positive_definite,
        nonsingular=nonsingular,
        chain_consistent=(
            quadratic_growth == positive_definite
            and (not positive_definite or nonsingular)
        ),
    )
    return report


def certify(f, xbar, tol=STATIONARITY_TOL):
    """Dispatch certification over the structured-function union."""
    if isinstance(f, Smooth):
        return certify_smooth(f.oracle, xbar, tol)
    if isinstance(f, MaxOfSmooth):
        return certify_max(f, xbar, tol)
    if isinstance(f, L1Regularized):
        return certify_l1(f, xbar, tol)
    if isinstance(f, LpLeastSquares):
        return certify_lp(f, xbar, tol)
    raise UnsupportedClass("no analytic certificate for %r" % type(f).__name__)
