"""Independent grid oracle for the max-class ratio program.

Re-derives the certified modulus by brute force in the plane: dense
sphere directions, multiplier vertices from an independent least-squares
enumeration, and an exact tiny min-norm solve over the face segment
plus at most two cone generators.  Resolution-limited, so comparisons
use a 1e-3 relative band as stated for the grid cross-check.
"""

import itertools
import math

import numpy as np
import pytest

from kl_analyzer import certify, subdiff
from kl_analyzer.model import MaxOfSmooth, PolynomialOracle, Quadratic


def _vertices_by_lstsq(grads):
    m = len(grads)
    n = grads[0].shape[0]
    a = np.zeros((n + 1, m))
    a[0, :] = 1.0
    for i, g in enumerate(grads):
        a[1:, i] = g
    b = np.zeros(n + 1)
    b[0] = 1.0
    out = []
    for size in range(1, m + 1):
        for sup in itertools.combinations(range(m), size):
            a_s = a[:, sup]
            lam_s, *_ = np.linalg.lstsq(a_s, b, rcond=None)
            if np.max(np.abs(a_s @ lam_s - b)) > 1e-10 or np.any(lam_s < -1e-10):
                continue
            lam = np.zeros(m)
            lam[list(sup)] = np.maximum(lam_s, 0.0)
            key = tuple(np.round(lam, 9))
            if key not in {tuple(np.round(v, 9)) for v in out}:
                out.append(lam)
    return out


def _min_norm_point_cone_exact(p, gens):
    """min ||p + sum beta_j g_j|| for up to two generators, exactly."""
    best = float(p @ p)
    for j, g in enumerate(gens):
        gg = float(g @ g)
        if gg <= 0:
            continue
        beta = max(0.0, -float(p @ g) / gg)
        v = p + beta * g
        best = min(best, float(v @ v))
    if len(gens) == 2:
        g1, g2 = gens
        gram = np.array([[float(g1 @ g1), float(g1 @ g2)], [float(g2 @ g1), float(g2 @ g2)]])
        rhs = -np.array([float(p @ g1), float(p @ g2)])
        try:
            beta = np.linalg.solve(gram, rhs)
        except np.linalg.LinAlgError:
            beta = None
        if beta is not None and np.all(beta >= 0.0):
            v = p + beta[0] * g1 + beta[1] * g2
            best = min(best, float(v @ v))
    return best


def _grid_modulus(f, xbar, directions=20000, face_grid=51):
    data = subdiff.active_set(f, xbar)
    grads = [np.asarray(g) for g in data.gradients]
    hesss = [np.asarray(h) for h in data.hessians]
    vertices = _vertices_by_lstsq(grads)
    best = math.inf
    for k in range(directions):
        phi = 2.0 * math.pi * k / directions
        w = np.array([math.cos(phi), math.sin(phi)])
        slopes = [float(g @ w) for g in grads]
        if any(s > 1e-9 for s in slopes):
            continue
        q = [float(w @ h @ w) for h in hesss]
        vals = [float(lam @ q) for lam in vertices]
        kappa = max(vals)
        if kappa <= 1e-9:
            continue
        face = [vertices[i] for i in range(len(vertices)) if vals[i] >= kappa - 1e-10]
        pts = [sum(lam[i] * (hesss[i] @ w) for i in range(len(grads))) for lam in face]
        gens = [grads[i] for i in range(len(grads))
                if abs(slopes[i]) <= 1e-9 and float(grads[i] @ grads[i]) > 1e-16]
        dist_sq = math.inf
        for t in range(face_grid):
            if len(pts) == 1:
                p = pts[0]
            else:
                s = t / (face_grid - 1.0)
                p = (1.0 - s) * pts[0] + s * pts[-1]
            dist_sq = min(dist_sq, _min_norm_point_cone_exact(p, gens[:2]))
            if len(pts) == 1:
                break
        best = min(best, 0.5 * dist_sq / kappa)
    return math.sqrt(best) if math.isfinite(best) else math.inf


@pytest.mark.parametrize(
    "members, hand_value",
    [
        # two-ball: modulus 1
        ((Quadratic(np.eye(2)), Quadratic(2.0 * np.eye(2))), 1.0),
        # opposing gradients with distinct curvatures: modulus sqrt(1.5)
        (
            (
                PolynomialOracle(2, [(1.0, (1, 0)), (1.0, (0, 2))]),
                PolynomialOracle(2, [(-1.0, (1, 0)), (2.0, (0, 2))]),
            ),
            math.sqrt(1.5),
        ),
        # three branches, flat cone = the ray along -e2: multipliers pin
        # lambda = (1/2, 1/2, 0), curvature 3/2 and image norm 3/2 there,
        # so the ratio is (1/2)(9/4)/(3/2) = 3/4
        (
            (
                Quadratic(np.diag([1.0, 2.0]), c=[1.0, 0.0]),
                Quadratic(np.diag([2.0, 1.0]), c=[-1.0, 0.0]),
                Quadratic(np.diag([3.0, 3.0]), c=[0.0, 1.0]),
            ),
            math.sqrt(0.75),
        ),
    ],
)
def test_certified_modulus_matches_grid_oracle(members, hand_value):
    f = MaxOfSmooth(members)
    cert = certify.certify_max(f, [0.0, 0.0])
    grid = _grid_modulus(f, [0.0, 0.0])
    assert cert.verdict == certify.KL_HOLDS_HALF
    assert math.isfinite(cert.modulus)
    # the grid oracle is resolution-limited; match within its band
    assert cert.modulus == pytest.approx(grid, rel=1e-3)
    assert cert.modulus == pytest.approx(hand_value, rel=1e-6)


def test_trivial_flat_cone_agrees_with_grid():
    # gradients positively span the plane: no flat direction at all, and
    # both the certifier and the oracle report an unbounded modulus
    f = MaxOfSmooth(
        (
            Quadratic(np.diag([1.0, 2.0]), c=[1.0, 0.0]),
            Quadratic(np.diag([2.0, 1.0]), c=[-1.0, 1.0]),
            Quadratic(np.diag([3.0, 3.0]), c=[0.0, -1.0]),
        )
    )
    cert = certify.certify_max(f, [0.0, 0.0])
    assert cert.verdict == certify.KL_HOLDS_HALF
    assert cert.modulus == math.inf
    assert _grid_modulus(f, [0.0, 0.0]) == math.inf
