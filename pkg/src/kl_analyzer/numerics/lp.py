"""Small dense linear programming by the two-phase simplex method.

Minimizes c^T x subject to Aeq x = beq and per-variable bounds.  Bland's
rule is used for both entering and leaving choices, which makes the
pivot sequence deterministic and cycle-free.  Intended scale is tiny
(a few dozen variables), where a dense tableau is the simplest correct
tool.
"""

import math

import numpy as np

from ..errors import DimensionMismatch, NoConvergence
from . import backend

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"

_FEAS_TOL = 1e-9
_PIVOT_TOL = 1e-11


class LPResult:
    """Solution container: x, objective value, status, equality duals."""

    def __init__(self, x, value, status, duals):
        self.x = x
        self.value = value
        self.status = status
        self.duals = duals


def _simplex_standard(c, a, b, maxiter=20000):
    """min c^T z, A z = b, z >= 0 via two phases with Bland's rule.

    Returns (z, basis, status).  Rows of `a` must be independent enough
    for phase 1 to drive artificials out; redundant rows are tolerated
    (their artificials stay basic at zero and are skipped in pricing).
    """
    m, n = a.shape
    b = b.copy()
    a = a.copy()
    for i in range(m):
        if b[i] < 0.0:
            a[i, :] = -a[i, :]
            b[i] = -b[i]

    # phase 1 tableau with artificial variables n..n+m-1
    tab = np.zeros((m, n + m))
    tab[:, :n] = a
    for i in range(m):
        tab[i, n + i] = 1.0
    basis = list(range(n, n + m))
    rhs = b.copy()
    cost1 = np.zeros(n + m)
    cost1[n:] = 1.0

    def pivot(tab, rhs, basis, row, col):
        piv = tab[row, col]
        tab[row, :] = tab[row, :] / piv
        rhs[row] = rhs[row] / piv
        for r in range(tab.shape[0]):
            if r != row and tab[r, col] != 0.0:
                f = tab[r, col]
                tab[r, :] -= f * tab[row, :]
                rhs[r] -= f * rhs[row]
        basis[row] = col

    def run(tab, rhs, basis, cost, ncols):
        for _ in range(maxiter):
            cb = cost[basis]
            # reduced costs: c_j - cb^T B^{-1} A_j; tableau already holds B^{-1}A
            red = cost[:ncols] - cb @ tab[:, :ncols]
            enter = -1
            for j in range(ncols):
                if red[j] < -_PIVOT_TOL:
                    enter = j
                    break
            if enter < 0:
                return OPTIMAL
            leave = -1
            best_ratio = math.inf
            for i in range(m):
                tij = tab[i, enter]
                if tij > _PIVOT_TOL:
                    ratio = rhs[i] / tij
                    if ratio < best_ratio - 1e-15 or (
                        abs(ratio - best_ratio) <= 1e-15
                        and (leave < 0 or basis[i] < basis[leave])
                    ):
                        best_ratio = ratio
                        leave = i
            if leave < 0:
                return UNBOUNDED
            pivot(tab, rhs, basis, leave, enter)
        raise NoConvergence("simplex iteration cap reached")

    status = run(tab, rhs, basis, cost1, n + m)
    phase1_val = float(np.dot(cost1[basis], rhs))
    if status != OPTIMAL or phase1_val > _FEAS_TOL * (1.0 + float(np.max(np.abs(b))) if m else 1.0):
        return None, None, INFEASIBLE

    # drive artificials out of the basis where possible
    for i in range(m):
        if basis[i] >= n:
            for j in range(n):
                if abs(tab[i, j]) > _PIVOT_TOL:
                    pivot(tab, rhs, basis, i, j)
                    break

    # artificials are excluded from phase-2 pricing (ncols = n); any that
    # remain basic sit at value zero on redundant rows and cost nothing
    cost2 = np.zeros(n + m)
    cost2[:n] = c
    status = run(tab, rhs, basis, cost2, n)
    if status != OPTIMAL:
        return None, None, status
    z = np.zeros(n)
    for i in range(m):
        if basis[i] < n:
            z[basis[i]] = rhs[i]
    return z, basis, OPTIMAL


def solve_lp(c, a_eq, b_eq, bounds):
    """Solve min c^T x s.t. a_eq x = b_eq, bounds[i] = (lo, hi) per variable.

    Use -inf / +inf for unbounded sides.  Returns an LPResult; `duals`
    holds one multiplier per equality row (the y solving B^T y = c_B),
    so strong duality value agreement can be asserted by the caller.
    """
    c = np.asarray(c, dtype=np.float64)
    a_eq = np.asarray(a_eq, dtype=np.float64)
    b_eq = np.asarray(b_eq, dtype=np.float64)
    if a_eq.ndim != 2 or a_eq.shape[1] != c.shape[0] or a_eq.shape[0] != b_eq.shape[0]:
        raise DimensionMismatch("inconsistent LP shapes")
    nvar = c.shape[0]
    if len(bounds) != nvar:
        raise DimensionMismatch("one bound pair per variable required")
    if nvar > 64:
        raise DimensionMismatch("LP variable count capped at 64")

    # standard-form transcription: column mapping per original variable
    cols = []  # (kind, data) kind: 'shift' (col, lo) | 'split' (col_pos, col_neg)
    std_c = []
    std_cols = []
    upper_rows = []  # (std_col, ub_shifted)
    offset = 0.0
    for i in range(nvar):
        lo, hi = bounds[i]
        if lo == -math.inf:
            cols.append(("split", len(std_c), len(std_c) + 1))
            std_c.extend([c[i], -c[i]])
            std_cols.extend([a_eq[:, i], -a_eq[:, i]])
            if hi != math.inf:
                raise DimensionMismatch("free variable with finite upper bound unsupported")
        else:
            cols.append(("shift", len(std_c), lo))
            std_c.append(c[i])
            std_cols.append(a_eq[:, i])
            offset += c[i] * lo
            if hi != math.inf:
                upper_rows.append((len(std_c) - 1, hi - lo))

    nstd = len(std_c)
    mrows = a_eq.shape[0] + len(upper_rows)
    a_std = np.zeros((mrows, nstd + len(upper_rows)))
    b_std = np.zeros(mrows)
    for j, col in enumerate(std_cols):
        a_std[: a_eq.shape[0], j] = col
    b_std[: a_eq.shape[0]] = b_eq
    # subtract lower-bound shifts from the rhs
    for i in range(nvar):
        kind = cols[i]
        if kind[0] == "shift" and kind[2] != 0.0:
            b_std[: a_eq.shape[0]] -= a_eq[:, i] * kind[2]
    for r, (j, ub) in enumerate(upper_rows):
        a_std[a_eq.shape[0] + r, j] = 1.0
        a_std[a_eq.shape[0] + r, nstd + r] = 1.0
        b_std[a_eq.shape[0] + r] = ub

    c_std = np.zeros(nstd + len(upper_rows))
    c_std[:nstd] = std_c

    z, basis, status = _simplex_standard(c_std, a_std, b_std)
    if status != OPTIMAL:
        return LPResult(None, None, status, None)

    x = np.zeros(nvar)
    for i in range(nvar):
        kind = cols[i]
        if kind[0] == "split":
            x[i] = z[kind[1]] - z[kind[2]]
        else:
            x[i] = z[kind[1]] + kind[2]
    value = float(np.dot(c, x))

    # equality duals from the final basis: solve B^T y = c_B
    bmat = np.zeros((mrows, mrows))
    cb = np.zeros(mrows)
    total_cols = nstd + len(upper_rows)
    for i, bj in enumerate(basis):
        if bj < total_cols:
            bmat[:, i] = a_std[:, bj]
            cb[i] = c_std[bj]
        else:
            bmat[bj - total_cols, i] = 1.0
            cb[i] = 0.0
    try:
        y = backend.solve_linear(bmat.T, cb)
        duals = np.asarray(y[: a_eq.shape[0]], dtype=np.float64)
    except Exception:
        duals = None
    return LPResult(x, value, OPTIMAL, duals)
