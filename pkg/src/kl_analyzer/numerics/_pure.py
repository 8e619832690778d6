"""Pure-Python numerical kernels.

Reference implementations of the hot kernels: the counter-based RNG,
uniform annulus sampling, the cyclic Jacobi eigensolver, Wolfe's
minimum-norm-point algorithm and a pivoted dense linear solve.  The
compiled extension (``_core.pyx``) is a statement-for-statement
translation of this module; both backends perform the same floating
point operations in the same order, so results agree bit for bit.

Everything here is deliberately scalar and loop-based: fixed evaluation
order, no vectorized reductions, no FMA.  Inputs are small and dense
(desk scale, n of order a few hundred at most).
"""

import math

import numpy as np

from ..errors import NoConvergence, SingularMatrix

_MASK64 = (1 << 64) - 1
_PHILOX_M = 0xD2B74407B1CE6E93
_PHILOX_W = 0x9E3779B97F4A7C15
_INV53 = 1.0 / (1 << 53)


def _philox_block(seed, block, stream):
    """Philox-2x64-10 block function: counter (block, stream), key seed."""
    x0 = block & _MASK64
    x1 = stream & _MASK64
    k = seed & _MASK64
    for _ in range(10):
        prod = _PHILOX_M * x0
        hi = (prod >> 64) & _MASK64
        lo = prod & _MASK64
        x0 = hi ^ k ^ x1
        x1 = lo
        k = (k + _PHILOX_W) & _MASK64
    return x0, x1


def _uniform_at(seed, stream, index):
    block, slot = divmod(index, 2)
    pair = _philox_block(seed, block, stream)
    return (pair[slot] >> 11) * _INV53


def uniforms(seed, stream, start, count):
    """`count` doubles in [0, 1) from the (seed, stream) substream,
    starting at draw index `start`."""
    out = np.empty(count, dtype=np.float64)
    for i in range(count):
        out[i] = _uniform_at(seed, stream, start + i)
    return out


def _gaussian_at(seed, stream, index):
    pair_idx, slot = divmod(index, 2)
    u1 = _uniform_at(seed, stream, 2 * pair_idx)
    u2 = _uniform_at(seed, stream, 2 * pair_idx + 1)
    if u1 <= 0.0:
        u1 = _INV53
    r = math.sqrt(-2.0 * math.log(u1))
    a = 2.0 * math.pi * u2
    if slot == 0:
        return r * math.cos(a)
    return r * math.sin(a)


def gaussians(seed, stream, start, count):
    """Standard normals via Box-Muller on consecutive uniform pairs."""
    out = np.empty(count, dtype=np.float64)
    for i in range(count):
        out[i] = _gaussian_at(seed, stream, start + i)
    return out


def annulus_offsets(seed, stream_base, count, dim, r_lo, r_hi):
    """Uniform samples from the annulus r_lo <= ||y|| <= r_hi in R^dim.

    Sample j draws from substream ``stream_base + j``: `dim` gaussians
    for the direction (draw indices 0..), then one uniform for the
    radius.  The radius CDF inversion is done relative to r_hi so it
    stays finite for any dimension.
    """
    out = np.empty((count, dim), dtype=np.float64)
    npairs = (dim + 1) // 2
    ratio = r_lo / r_hi
    v = ratio**dim
    inv_dim = 1.0 / dim
    for j in range(count):
        stream = stream_base + j
        norm_sq = 0.0
        g = [0.0] * dim
        for i in range(dim):
            gi = _gaussian_at(seed, stream, i)
            g[i] = gi
            norm_sq += gi * gi
        norm = math.sqrt(norm_sq)
        u = _uniform_at(seed, stream, 2 * npairs)
        r = r_hi * (v + u * (1.0 - v)) ** inv_dim
        if norm < 1e-300:
            for i in range(dim):
                out[j, i] = 0.0
            out[j, 0] = r
        else:
            s = r / norm
            for i in range(dim):
                out[j, i] = s * g[i]
    return out


def jacobi_eigen(a_in):
    """Eigendecomposition of a symmetric matrix by cyclic-by-row Jacobi.

    Returns (values, vectors) with values sorted descending and vectors
    the matching orthonormal columns.  Rotation order is fixed, the
    off-diagonal threshold is 1e-12 relative to the largest input entry
    and at most 100 sweeps are performed.
    """
    a_in = np.asarray(a_in, dtype=np.float64)
    n = a_in.shape[0]
    a = [[0.5 * (float(a_in[i, j]) + float(a_in[j, i])) for j in range(n)] for i in range(n)]
    vec = [[1.0 if i == j else 0.0 for j in range(n)] for i in range(n)]
    scale = 1.0
    for i in range(n):
        for j in range(n):
            if abs(a[i][j]) > scale:
                scale = abs(a[i][j])
    thresh = 1e-12 * scale

    converged = n < 2
    for _sweep in range(100):
        if converged:
            break
        off = 0.0
        for p in range(n - 1):
            for q in range(p + 1, n):
                if abs(a[p][q]) > off:
                    off = abs(a[p][q])
        if off <= thresh:
            converged = True
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p][q]
                if abs(apq) <= thresh:
                    continue
                theta = (a[q][q] - a[p][p]) / (2.0 * apq)
                if theta >= 0.0:
                    t = 1.0 / (theta + math.sqrt(theta * theta + 1.0))
                else:
                    t = -1.0 / (-theta + math.sqrt(theta * theta + 1.0))
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                app = a[p][p]
                aqq = a[q][q]
                a[p][p] = app - t * apq
                a[q][q] = aqq + t * apq
                a[p][q] = 0.0
                a[q][p] = 0.0
                for r in range(n):
                    if r != p and r != q:
                        arp = a[r][p]
                        arq = a[r][q]
                        a[r][p] = c * arp - s * arq
                        a[p][r] = a[r][p]
                        a[r][q] = s * arp + c * arq
                        a[q][r] = a[r][q]
                for r in range(n):
                    vrp = vec[r][p]
                    vrq = vec[r][q]
                    vec[r][p] = c * vrp - s * vrq
                    vec[r][q] = s * vrp + c * vrq
    if not converged and n >= 2:
        off = 0.0
        for p in range(n - 1):
            for q in range(p + 1, n):
                if abs(a[p][q]) > off:
                    off = abs(a[p][q])
        if off > thresh:
            raise NoConvergence("jacobi sweeps exhausted with off-diagonal %.3e" % off)

    order = sorted(range(n), key=lambda i: (-a[i][i], i))
    values = np.empty(n, dtype=np.float64)
    vectors = np.empty((n, n), dtype=np.float64)
    for col, i in enumerate(order):
        values[col] = a[i][i]
        flip = False
        for r in range(n):
            comp = vec[r][i]
            if abs(comp) > 1e-12:
                flip = comp < 0.0
                break
        for r in range(n):
            vectors[r, col] = -vec[r][i] if flip else vec[r][i]
    return values, vectors


def solve_linear(a_in, b_in):
    """Dense linear solve by Gaussian elimination with partial pivoting."""
    a_in = np.asarray(a_in, dtype=np.float64)
    b_in = np.asarray(b_in, dtype=np.float64)
    n = a_in.shape[0]
    a = [[float(a_in[i, j]) for j in range(n)] for i in range(n)]
    b = [float(b_in[i]) for i in range(n)]
    scale = 1.0
    for i in range(n):
        for j in range(n):
            if abs(a[i][j]) > scale:
                scale = abs(a[i][j])
    for col in range(n):
        piv = col
        best = abs(a[col][col])
        for r in range(col + 1, n):
            if abs(a[r][col]) > best:
                best = abs(a[r][col])
                piv = r
        if best <= 1e-14 * scale:
            raise SingularMatrix("pivot %.3e at column %d" % (best, col))
        if piv != col:
            a[col], a[piv] = a[piv], a[col]
            b[col], b[piv] = b[piv], b[col]
        inv = 1.0 / a[col][col]
        for r in range(col + 1, n):
            f = a[r][col] * inv
            if f != 0.0:
                for j in range(col, n):
                    a[r][j] -= f * a[col][j]
                b[r] -= f * b[col]
    x = [0.0] * n
    for i in range(n - 1, -1, -1):
        s = b[i]
        for j in range(i + 1, n):
            s -= a[i][j] * x[j]
        x[i] = s / a[i][i]
    return np.asarray(x, dtype=np.float64)


def _affine_minimizer(pts, corral):
    """Min-norm point in the affine hull of pts[corral].

    Solves the KKT system [G 1; 1^T 0] [alpha; nu] = [0; 1] with G the
    Gram matrix of the corral.  Returns barycentric coordinates.
    """
    m = len(corral)
    n = len(pts[0])
    size = m + 1
    mat = [[0.0] * size for _ in range(size)]
    rhs = [0.0] * size
    for i in range(m):
        pi = pts[corral[i]]
        for j in range(m):
            pj = pts[corral[j]]
            s = 0.0
            for t in range(n):
                s += pi[t] * pj[t]
            mat[i][j] = s
        mat[i][m] = 1.0
        mat[m][i] = 1.0
    rhs[m] = 1.0
    sol = solve_linear(np.asarray(mat), np.asarray(rhs))
    return [float(sol[i]) for i in range(m)]


def min_norm_point(points_in):
    """Minimum-norm point of the convex hull of the given points.

    Wolfe's algorithm with deterministic lowest-index tie breaking.
    Returns (v, weights) with v = sum_i weights[i] * points[i], weights
    on the simplex, and v certified by the Wolfe criterion
    <v, p_i - v> >= -1e-10 * scale for every input point.
    """
    points_in = np.asarray(points_in, dtype=np.float64)
    m, n = points_in.shape
    pts = [[float(points_in[i, j]) for j in range(n)] for i in range(m)]

    scale = 1.0
    for i in range(m):
        s = 0.0
        for t in range(n):
            s += pts[i][t] * pts[i][t]
        if s > scale:
            scale = s
    tol = 1e-11 * scale
    drop_tol = 1e-14

    best = 0
    best_norm = math.inf
    for i in range(m):
        s = 0.0
        for t in range(n):
            s += pts[i][t] * pts[i][t]
        if s < best_norm:
            best_norm = s
            best = i
    corral = [best]
    weights = [1.0]
    x = list(pts[best])

    max_iter = 100 + 16 * m * m
    stuck = False
    for _it in range(max_iter):
        if stuck:
            break
        xx = 0.0
        for t in range(n):
            xx += x[t] * x[t]
        jbest = -1
        dbest = math.inf
        for jj in range(m):
            d = 0.0
            for t in range(n):
                d += x[t] * pts[jj][t]
            if d < dbest:
                dbest = d
                jbest = jj
        if dbest >= xx - tol or jbest in corral:
            break
        corral.append(jbest)
        weights.append(0.0)

        for _minor in range(2 * m + 2):
            try:
                alpha = _affine_minimizer(pts, corral)
            except SingularMatrix:
                # affinely dependent corral: drop the new member and stop
                corral.pop()
                weights.pop()
                stuck = True
                break
            if all(ai > drop_tol for ai in alpha):
                weights = alpha
                break
            theta = 1.0
            for i in range(len(corral)):
                if alpha[i] <= drop_tol:
                    denom = weights[i] - alpha[i]
                    if denom > 1e-300:
                        cand = weights[i] / denom
                        if cand < theta:
                            theta = cand
            new_w = []
            new_c = []
            for i in range(len(corral)):
                wi = (1.0 - theta) * weights[i] + theta * alpha[i]
                if wi > drop_tol:
                    new_w.append(wi)
                    new_c.append(corral[i])
            if not new_c:
                new_c = [corral[0]]
                new_w = [1.0]
            total = 0.0
            for wi in new_w:
                total += wi
            corral = new_c
            weights = [wi / total for wi in new_w]
        x = [0.0] * n
        for i in range(len(corral)):
            wi = weights[i]
            pi = pts[corral[i]]
            for t in range(n):
                x[t] += wi * pi[t]

    v = np.asarray(x, dtype=np.float64)
    w_full = np.zeros(m, dtype=np.float64)
    for i in range(len(corral)):
        w_full[corral[i]] += weights[i]
    return v, w_full
