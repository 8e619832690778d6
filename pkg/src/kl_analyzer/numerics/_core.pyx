# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled twin of the pure-Python kernels.

Statement-for-statement translation of ``_pure.py``: identical
operations in identical order, so both backends return bit-identical
results.  Keep the two files in sync; the parity test suite compares
them directly.
"""

import math

import numpy as np

from ..errors import NoConvergence, SingularMatrix

cdef extern from *:
    """
    #include <stdint.h>
    static inline uint64_t kl_mulhi64(uint64_t a, uint64_t b) {
        return (uint64_t)(((__uint128_t)a * b) >> 64);
    }
    """
    unsigned long long kl_mulhi64(unsigned long long a, unsigned long long b) nogil

from libc.math cimport cos, fabs, log, pow, sin, sqrt

ctypedef unsigned long long u64

cdef u64 PHILOX_M = 0xD2B74407B1CE6E93
cdef u64 PHILOX_W = 0x9E3779B97F4A7C15
cdef double INV53 = 1.0 / 9007199254740992.0
cdef double TWO_PI = 2.0 * 3.141592653589793


cdef inline void philox_block(u64 seed, u64 block, u64 stream, u64* o0, u64* o1) nogil:
    cdef u64 x0 = block
    cdef u64 x1 = stream
    cdef u64 k = seed
    cdef u64 hi, lo
    cdef int r
    for r in range(10):
        hi = kl_mulhi64(PHILOX_M, x0)
        lo = PHILOX_M * x0
        x0 = hi ^ k ^ x1
        x1 = lo
        k = k + PHILOX_W
    o0[0] = x0
    o1[0] = x1


cdef inline double uniform_at(u64 seed, u64 stream, u64 index) nogil:
    cdef u64 block = index >> 1
    cdef u64 o0, o1
    philox_block(seed, block, stream, &o0, &o1)
    if index & 1:
        return <double>(o1 >> 11) * INV53
    return <double>(o0 >> 11) * INV53


cdef inline double gaussian_at(u64 seed, u64 stream, u64 index) nogil:
    cdef u64 pair_idx = index >> 1
    cdef double u1 = uniform_at(seed, stream, 2 * pair_idx)
    cdef double u2 = uniform_at(seed, stream, 2 * pair_idx + 1)
    cdef double r, a
    if u1 <= 0.0:
        u1 = INV53
    r = sqrt(-2.0 * log(u1))
    a = TWO_PI * u2
    if index & 1:
        return r * sin(a)
    return r * cos(a)


def uniforms(seed, stream, start, count):
    """`count` doubles in [0, 1) from the (seed, stream) substream."""
    cdef u64 s = seed, st = stream, sta = start
    cdef Py_ssize_t n = count, i
    out = np.empty(n, dtype=np.float64)
    cdef double[::1] o = out
    for i in range(n):
        o[i] = uniform_at(s, st, sta + <u64>i)
    return out


def gaussians(seed, stream, start, count):
    """Standard normals via Box-Muller on consecutive uniform pairs."""
    cdef u64 s = seed, st = stream, sta = start
    cdef Py_ssize_t n = count, i
    out = np.empty(n, dtype=np.float64)
    cdef double[::1] o = out
    for i in range(n):
        o[i] = gaussian_at(s, st, sta + <u64>i)
    return out


def annulus_offsets(seed, stream_base, count, dim, r_lo, r_hi):
    """Uniform samples from the annulus r_lo <= ||y|| <= r_hi in R^dim."""
    cdef u64 s = seed, sb = stream_base, stream
    cdef Py_ssize_t m = count, n = dim, i, j
    cdef double rlo = r_lo, rhi = r_hi
    out = np.empty((m, n), dtype=np.float64)
    cdef double[:, ::1] o = out
    cdef Py_ssize_t npairs = (n + 1) // 2
    cdef double ratio = rlo / rhi
    cdef double v = pow(ratio, <double>n)
    cdef double inv_dim = 1.0 / <double>n
    cdef double norm_sq, gi, norm, u, r, sc
    g_buf = np.empty(n, dtype=np.float64)
    cdef double[::1] g = g_buf
    for j in range(m):
        stream = sb + <u64>j
        norm_sq = 0.0
        for i in range(n):
            gi = gaussian_at(s, stream, <u64>i)
            g[i] = gi
            norm_sq += gi * gi
        norm = sqrt(norm_sq)
        u = uniform_at(s, stream, <u64>(2 * npairs))
        r = rhi * pow(v + u * (1.0 - v), inv_dim)
        if norm < 1e-300:
            for i in range(n):
                o[j, i] = 0.0
            o[j, 0] = r
        else:
            sc = r / norm
            for i in range(n):
                o[j, i] = sc * g[i]
    return out


def jacobi_eigen(a_in):
    """Cyclic-by-row Jacobi eigendecomposition; see the pure twin."""
    a_arr = np.array(a_in, dtype=np.float64, order="C")
    cdef Py_ssize_t n = a_arr.shape[0]
    cdef double[:, :] ain = a_arr.reshape(n, n)
    a_buf = np.empty((n, n), dtype=np.float64)
    v_buf = np.empty((n, n), dtype=np.float64)
    cdef double[:, ::1] a = a_buf
    cdef double[:, ::1] vec = v_buf
    cdef Py_ssize_t i, j, p, q, r, sweep, col
    for i in range(n):
        for j in range(n):
            a[i, j] = 0.5 * (ain[i, j] + ain[j, i])
            vec[i, j] = 1.0 if i == j else 0.0
    cdef double scale = 1.0
    for i in range(n):
        for j in range(n):
            if fabs(a[i, j]) > scale:
                scale = fabs(a[i, j])
    cdef double thresh = 1e-12 * scale

    cdef bint converged = n < 2
    cdef double off, apq, theta, t, c, s2, app, aqq, arp, arq, vrp, vrq
    for sweep in range(100):
        if converged:
            break
        off = 0.0
        for p in range(n - 1):
            for q in range(p + 1, n):
                if fabs(a[p, q]) > off:
                    off = fabs(a[p, q])
        if off <= thresh:
            converged = True
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if fabs(apq) <= thresh:
                    continue
                theta = (a[q, q] - a[p, p]) / (2.0 * apq)
                if theta >= 0.0:
                    t = 1.0 / (theta + sqrt(theta * theta + 1.0))
                else:
                    t = -1.0 / (-theta + sqrt(theta * theta + 1.0))
                c = 1.0 / sqrt(t * t + 1.0)
                s2 = t * c
                app = a[p, p]
                aqq = a[q, q]
                a[p, p] = app - t * apq
                a[q, q] = aqq + t * apq
                a[p, q] = 0.0
                a[q, p] = 0.0
                for r in range(n):
                    if r != p and r != q:
                        arp = a[r, p]
                        arq = a[r, q]
                        a[r, p] = c * arp - s2 * arq
                        a[p, r] = a[r, p]
                        a[r, q] = s2 * arp + c * arq
                        a[q, r] = a[r, q]
                for r in range(n):
                    vrp = vec[r, p]
                    vrq = vec[r, q]
                    vec[r, p] = c * vrp - s2 * vrq
                    vec[r, q] = s2 * vrp + c * vrq
    if not converged and n >= 2:
        off = 0.0
        for p in range(n - 1):
            for q in range(p + 1, n):
                if fabs(a[p, q]) > off:
                    off = fabs(a[p, q])
        if off > thresh:
            raise NoConvergence("jacobi sweeps exhausted with off-diagonal %.3e" % off)

    order = sorted(range(n), key=lambda k: (-a_buf[k, k], k))
    values = np.empty(n, dtype=np.float64)
    vectors = np.empty((n, n), dtype=np.float64)
    cdef double[::1] valv = values
    cdef double[:, ::1] vecv = vectors
    cdef bint flip
    cdef Py_ssize_t src
    for col in range(n):
        src = order[col]
        valv[col] = a[src, src]
        flip = False
        for r in range(n):
            if fabs(vec[r, src]) > 1e-12:
                flip = vec[r, src] < 0.0
                break
        for r in range(n):
            vecv[r, col] = -vec[r, src] if flip else vec[r, src]
    return values, vectors


cdef int _solve_linear_buf(double[:, ::1] a, double[::1] b, Py_ssize_t n) except -1:
    """In-place Gaussian elimination with partial pivoting; solution in b.

    Raises SingularMatrix on a numerically zero pivot (mirrors the pure
    twin's tolerance exactly).
    """
    cdef double scale = 1.0
    cdef Py_ssize_t i, j, col, piv, r
    cdef double best, f, inv, tmp, s
    for i in range(n):
        for j in range(n):
            if fabs(a[i, j]) > scale:
                scale = fabs(a[i, j])
    for col in range(n):
        piv = col
        best = fabs(a[col, col])
        for r in range(col + 1, n):
            if fabs(a[r, col]) > best:
                best = fabs(a[r, col])
                piv = r
        if best <= 1e-14 * scale:
            raise SingularMatrix("pivot %.3e at column %d" % (best, col))
        if piv != col:
            for j in range(n):
                tmp = a[col, j]
                a[col, j] = a[piv, j]
                a[piv, j] = tmp
            tmp = b[col]
            b[col] = b[piv]
            b[piv] = tmp
        inv = 1.0 / a[col, col]
        for r in range(col + 1, n):
            f = a[r, col] * inv
            if f != 0.0:
                for j in range(col, n):
                    a[r, j] -= f * a[col, j]
                b[r] -= f * b[col]
    for i in range(n - 1, -1, -1):
        s = b[i]
        for j in range(i + 1, n):
            s -= a[i, j] * b[j]
        b[i] = s / a[i, i]
    return 0


def solve_linear(a_in, b_in):
    """Dense linear solve by Gaussian elimination with partial pivoting."""
    a_arr = np.array(a_in, dtype=np.float64, order="C")
    b_arr = np.array(b_in, dtype=np.float64).reshape(-1)
    cdef Py_ssize_t n = a_arr.shape[0]
    cdef double[:, ::1] a = a_arr.reshape(n, n)
    cdef double[::1] b = b_arr
    _solve_linear_buf(a, b, n)
    return b_arr


def min_norm_point(points_in):
    """Wolfe minimum-norm point; mirrors the pure twin."""
    pts_arr = np.array(points_in, dtype=np.float64, order="C")
    cdef Py_ssize_t m = pts_arr.shape[0], n = pts_arr.shape[1]
    cdef double[:, ::1] pts = pts_arr

    cdef double scale = 1.0, s, d
    cdef Py_ssize_t i, j, t
    for i in range(m):
        s = 0.0
        for t in range(n):
            s += pts[i, t] * pts[i, t]
        if s > scale:
            scale = s
    cdef double tol = 1e-11 * scale
    cdef double drop_tol = 1e-14

    cdef Py_ssize_t best = 0
    cdef double best_norm = math.inf
    for i in range(m):
        s = 0.0
        for t in range(n):
            s += pts[i, t] * pts[i, t]
        if s < best_norm:
            best_norm = s
            best = i
    corral = [best]
    weights = [1.0]
    x_buf = np.empty(n, dtype=np.float64)
    cdef double[::1] x = x_buf
    for t in range(n):
        x[t] = pts[best, t]

    cdef Py_ssize_t max_iter = 100 + 16 * m * m
    cdef bint stuck = False
    cdef Py_ssize_t it, minor, jbest, csize
    cdef double xx, dbest, theta, denom, cand, total, wi
    for it in range(max_iter):
        if stuck:
            break
        xx = 0.0
        for t in range(n):
            xx += x[t] * x[t]
        jbest = -1
        dbest = math.inf
        for j in range(m):
            d = 0.0
            for t in range(n):
                d += x[t] * pts[j, t]
            if d < dbest:
                dbest = d
                jbest = j
        if dbest >= xx - tol or jbest in corral:
            break
        corral.append(jbest)
        weights.append(0.0)

        for minor in range(2 * m + 2):
            try:
                alpha = _affine_minimizer(pts_arr, corral)
            except SingularMatrix:
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
            for wi_obj in new_w:
                total += wi_obj
            corral = new_c
            weights = [wi_obj / total for wi_obj in new_w]
        for t in range(n):
            x[t] = 0.0
        for i in range(len(corral)):
            wi = weights[i]
            j = corral[i]
            for t in range(n):
                x[t] += wi * pts[j, t]

    v = np.asarray(x_buf, dtype=np.float64)
    w_full = np.zeros(m, dtype=np.float64)
    for i in range(len(corral)):
        w_full[corral[i]] += weights[i]
    return v, w_full


def _affine_minimizer(pts_arr, corral):
    """Min-norm point in the affine hull of pts[corral] (KKT system)."""
    cdef double[:, ::1] pts = pts_arr
    cdef Py_ssize_t m = len(corral), n = pts_arr.shape[1]
    cdef Py_ssize_t size = m + 1
    mat_buf = np.zeros((size, size), dtype=np.float64)
    rhs_buf = np.zeros(size, dtype=np.float64)
    cdef double[:, ::1] mat = mat_buf
    cdef double[::1] rhs = rhs_buf
    cdef Py_ssize_t i, j, t, ci, cj
    cdef double s
    for i in range(m):
        ci = corral[i]
        for j in range(m):
            cj = corral[j]
            s = 0.0
            for t in range(n):
                s += pts[ci, t] * pts[cj, t]
            mat[i, j] = s
        mat[i, m] = 1.0
        mat[m, i] = 1.0
    rhs[m] = 1.0
    _solve_linear_buf(mat, rhs, size)
    return [rhs_buf[i] for i in range(m)]
