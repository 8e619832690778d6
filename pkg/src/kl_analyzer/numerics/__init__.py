"""Dense numerical kernels: eigendecomposition, min-norm point, LP,
linear solves, null spaces and the counter-based RNG.

All kernels are hand-rolled with a fixed evaluation order so repeated
runs reproduce bit for bit; see `backend` for the compiled/pure switch.
"""

import numpy as np

from .backend import (
    BACKEND_NAME,
    annulus_offsets,
    available_backends,
    gaussians,
    jacobi_eigen,
    min_norm_point,
    solve_linear,
    uniforms,
)
from .lp import INFEASIBLE, OPTIMAL, UNBOUNDED, LPResult, solve_lp

__all__ = [
    "BACKEND_NAME",
    "available_backends",
    "uniforms",
    "gaussians",
    "annulus_offsets",
    "jacobi_eigen",
    "min_norm_point",
    "solve_linear",
    "solve_lp",
    "LPResult",
    "OPTIMAL",
    "INFEASIBLE",
    "UNBOUNDED",
    "null_space",
    "spectral_norm",
]


def spectral_norm(a):
    """2-norm of a rectangular matrix via the Gram eigenproblem."""
    a = np.asarray(a, dtype=np.float64)
    if a.size == 0:
        return 0.0
    gram = a.T @ a
    values, _ = jacobi_eigen(gram)
    top = float(values[0]) if values.shape[0] else 0.0
    return float(np.sqrt(max(top, 0.0)))


def null_space(a, tol=1e-10):
    """Orthonormal basis of {x : ||A x|| <= tol * ||A|| * ||x||}.

    Columns are eigenvectors of A^T A with eigenvalue at most
    (tol * ||A||_2)^2, ordered by ascending eigenvalue.  For A = 0 the
    basis is the identity.
    """
    a = np.asarray(a, dtype=np.float64)
    if a.ndim != 2:
        raise ValueError("matrix expected")
    n = a.shape[1]
    if a.shape[0] == 0:
        return np.eye(n)
    gram = a.T @ a
    values, vectors = jacobi_eigen(gram)
    norm2 = max(float(values[0]), 0.0)
    cutoff = (tol * tol) * norm2
    cols = [i for i in range(n) if values[i] <= cutoff + 1e-300]
    cols.sort(key=lambda i: (values[i], i))
    if not cols:
        return np.zeros((n, 0))
    return np.column_stack([vectors[:, i] for i in cols])
