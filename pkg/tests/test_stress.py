"""Randomized stress tests with self-certifying optimality checks."""

import itertools
import math

import numpy as np
import pytest

from kl_analyzer import numerics
from kl_analyzer.errors import ProblemFormatError
from kl_analyzer.problem_io import parse_problem


class TestSimplexStress:
    def test_random_lps_carry_optimality_certificates(self):
        rng = np.random.default_rng(101)
        solved = 0
        for _ in range(200):
            m = int(rng.integers(1, 5))
            n = int(rng.integers(m, 9))
            a = rng.standard_normal((m, n))
            b = a @ rng.random(n)
            c = rng.standard_normal(n)
            res = numerics.solve_lp(c, a, b, [(0.0, math.inf)] * n)
            if res.status == numerics.UNBOUNDED:
                continue
            assert res.status == numerics.OPTIMAL
            solved += 1
            scale = 1.0 + float(np.max(np.abs(b)))
            # primal feasibility
            assert float(np.max(np.abs(a @ res.x - b))) <= 1e-7 * scale
            assert bool(np.all(res.x >= -1e-9))
            # dual feasibility and complementary slackness certify optimality
            red = c - a.T @ res.duals
            assert bool(np.all(red >= -1e-7 * (1.0 + float(np.max(np.abs(c))))))
            assert float(np.max(np.abs(res.x * red))) <= 1e-6 * scale
            assert abs(res.value - float(res.duals @ b)) <= 1e-8 * (1.0 + abs(res.value))
        assert solved >= 100

    def test_degenerate_rhs(self):
        # many basic solutions tie at zero; Bland's rule must terminate
        a = np.array([[1.0, 1.0, 1.0, 0.0], [1.0, -1.0, 0.0, 1.0]])
        b = np.zeros(2)
        c = np.array([1.0, 1.0, 1.0, 1.0])
        res = numerics.solve_lp(c, a, b, [(0.0, math.inf)] * 4)
        assert res.status == numerics.OPTIMAL
        assert abs(res.value) <= 1e-12

    def test_redundant_rows(self):
        a = np.array([[1.0, 1.0], [2.0, 2.0]])
        b = np.array([1.0, 2.0])
        res = numerics.solve_lp(np.array([1.0, 0.0]), a, b, [(0.0, math.inf)] * 2)
        assert res.status == numerics.OPTIMAL
        assert res.value == pytest.approx(0.0, abs=1e-10)


def _enumerate_min_norm(pts):
    m = pts.shape[0]
    best = math.inf
    for size in range(1, m + 1):
        for subset in itertools.combinations(range(m), size):
            sub = pts[list(subset)]
            gram = sub @ sub.T
            kkt = np.zeros((size + 1, size + 1))
            kkt[:size, :size] = gram
            kkt[:size, size] = 1.0
            kkt[size, :size] = 1.0
            rhs = np.zeros(size + 1)
            rhs[size] = 1.0
            try:
                sol = np.linalg.solve(kkt, rhs)
            except np.linalg.LinAlgError:
                continue
            alpha = sol[:size]
            if np.any(alpha < -1e-12):
                continue
            v = sub.T @ alpha
            best = min(best, float(v @ v))
    return best


class TestWolfeStress:
    def test_random_instances(self):
        rng = np.random.default_rng(202)
        for _ in range(60):
            m = int(rng.integers(1, 7))
            n = int(rng.integers(1, 5))
            pts = rng.standard_normal((m, n))
            v, w = numerics.min_norm_point(pts)
            want = _enumerate_min_norm(pts)
            scale = max(1.0, float(np.max(np.sum(pts * pts, axis=1))))
            assert float(v @ v) <= want + 1e-8 * scale
            assert abs(float(np.sum(w)) - 1.0) <= 1e-9

    def test_duplicated_points(self):
        pts = np.array([[1.0, 0.0], [1.0, 0.0], [-1.0, 0.0]])
        v, w = numerics.min_norm_point(pts)
        assert float(v @ v) <= 1e-18
        assert abs(float(np.sum(w)) - 1.0) <= 1e-12

    def test_collinear_points(self):
        pts = np.array([[2.0, 2.0], [1.0, 1.0], [3.0, 3.0]])
        v, _ = numerics.min_norm_point(pts)
        assert np.allclose(v, [1.0, 1.0], atol=1e-10)

    def test_origin_in_hull_high_dim(self):
        rng = np.random.default_rng(203)
        base = rng.standard_normal((5, 5))
        pts = np.vstack([base, -np.sum(base, axis=0, keepdims=True)])
        v, _ = numerics.min_norm_point(pts)
        # 0 = mean of the rows, so the hull contains the origin
        assert float(v @ v) <= 1e-16


class TestJacobiStress:
    @pytest.mark.parametrize("n", [10, 20, 40])
    def test_large_random(self, n):
        rng = np.random.default_rng(n)
        s = rng.standard_normal((n, n))
        s = 0.5 * (s + s.T)
        values, vectors = numerics.jacobi_eigen(s)
        scale = 1.0 + float(np.max(np.abs(s)))
        assert np.max(np.abs(vectors @ np.diag(values) @ vectors.T - s)) <= 1e-9 * scale
        assert np.max(np.abs(vectors.T @ vectors - np.eye(n))) <= 1e-10

    def test_clustered_eigenvalues(self):
        rng = np.random.default_rng(7)
        q, _ = np.linalg.qr(rng.standard_normal((8, 8)))
        diag = np.array([3.0, 3.0, 3.0, 1.0 + 1e-9, 1.0, 1.0, -2.0, -2.0])
        s = q @ np.diag(diag) @ q.T
        values, vectors = numerics.jacobi_eigen(s)
        assert np.allclose(np.sort(values), np.sort(diag), atol=1e-9)
        assert np.max(np.abs(vectors.T @ vectors - np.eye(8))) <= 1e-9


class TestParserFuzz:
    @pytest.mark.parametrize(
        "doc",
        [
            {},
            {"kind": "mystery", "dimension": 1, "xbar": [0.0]},
            {"kind": "smooth", "dimension": 0, "xbar": []},
            {"kind": "smooth", "dimension": 2, "xbar": [0.0]},
            {"kind": "smooth", "dimension": 2, "xbar": [0.0, 0.0]},
            {"kind": "smooth", "dimension": 2, "xbar": [0.0, 0.0], "smooth": {}},
            {
                "kind": "smooth",
                "dimension": 2,
                "xbar": [0.0, 0.0],
                "smooth": {"quadratic": {"Q": [[1.0]]}},
            },
            {"kind": "max", "dimension": 1, "xbar": [0.0], "max": []},
            {"kind": "l1", "dimension": 1, "xbar": [0.0], "l1": {"mu": 1.0}},
            {"kind": "lp", "dimension": 1, "xbar": [0.0], "lp": {"A": [[1.0]], "b": [0.0]}},
            {"kind": "smooth", "dimension": 2, "xbar": [0.0, 0.0], "theta": 1.5,
             "smooth": {"quadratic": {"Q": [[1.0, 0.0], [0.0, 1.0]]}}},
            {"kind": "staircase", "dimension": 2, "xbar": [0.0, 0.0]},
        ],
    )
    def test_schema_violations_raise_problem_format_error(self, doc):
        import json

        with pytest.raises(ProblemFormatError):
            parse_problem(json.dumps(doc))

    def test_malformed_utf8(self, tmp_path):
        from kl_analyzer.problem_io import load_problem

        p = tmp_path / "bad.json"
        p.write_bytes(b'\xff\xfe{"kind"}')
        with pytest.raises(ProblemFormatError):
            load_problem(str(p))
