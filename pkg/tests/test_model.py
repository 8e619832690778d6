import math

import numpy as np
import pytest

from kl_analyzer import fixtures
from kl_analyzer.errors import DimensionMismatch, DomainError
from kl_analyzer.model import (
    KLQuery,
    L1Regularized,
    LpLeastSquares,
    MaxOfSmooth,
    Point,
    PolynomialOracle,
    Quadratic,
    Smooth,
    evaluate,
    gradient_check,
    hessian_check,
    member_values,
)


def test_point_validation():
    with pytest.raises(DomainError):
        Point([1.0, math.nan])
    with pytest.raises(DomainError):
        Point([math.inf])
    with pytest.raises(DimensionMismatch):
        Point([])
    p = Point([1.0, 2.0])
    assert p.dimension == 2
    with pytest.raises(ValueError):
        p.coords[0] = 3.0


def test_evaluate_quadratic_minimum():
    f = Smooth(Quadratic(np.eye(2)))
    assert evaluate(f, [0.0, 0.0]) == 0.0


def test_evaluate_lp_direct_substitution():
    f = LpLeastSquares([[1.0]], [0.0], 1.0, 0.5)
    assert evaluate(f, [4.0]) == pytest.approx(18.0, abs=1e-12)


def test_evaluate_degenerate_fixture_hand_value(degenerate_smooth, degenerate_xbar):
    # -(1 + 1 - 6)^2 - 16 - 16 = -48
    assert evaluate(degenerate_smooth, degenerate_xbar) == pytest.approx(-48.0, abs=1e-12)


def test_evaluate_max_is_member_max():
    f = fixtures.two_ball_max()
    rng = np.random.default_rng(0)
    for _ in range(25):
        x = rng.standard_normal(2)
        assert evaluate(f, x) == max(member_values(f, x))


def test_evaluate_dimension_mismatch():
    f = Smooth(Quadratic(np.eye(2)))
    with pytest.raises(DimensionMismatch):
        evaluate(f, [1.0, 2.0, 3.0])


def test_abs_power_domain_error(degenerate_oracle):
    with pytest.raises(DomainError):
        degenerate_oracle.value(np.array([0.0, 1.0]))


def test_degenerate_fixture_hessian_exact(degenerate_oracle, degenerate_xbar):
    h = degenerate_oracle.hessian(degenerate_xbar)
    assert np.max(np.abs(h - np.array([[2.0, -2.0], [-2.0, 2.0]]))) <= 1e-12


def test_hessian_check_quadratic():
    oracle = Quadratic(np.diag([2.0, -1.0]))
    dev = hessian_check(oracle, [0.3, -0.7], 1e-4)
    assert dev < 1e-6


def test_hessian_check_degenerate_fixture(degenerate_oracle, degenerate_xbar):
    assert hessian_check(degenerate_oracle, degenerate_xbar, 1e-4) < 1e-3


def test_hessian_check_cubic():
    oracle = PolynomialOracle(1, [(1.0, (3,))])
    h = oracle.hessian(np.array([2.0]))
    assert abs(h[0, 0] - 12.0) <= 1e-12
    assert hessian_check(oracle, [2.0], 1e-4) < 1e-4


def _random_points(oracle, rng, count=20):
    # keep abs-power coordinates away from 0 so every oracle stays smooth
    for _ in range(count):
        x = rng.uniform(0.5, 1.5, size=oracle.dimension)
        yield x


def test_finite_difference_contract_all_oracles(degenerate_oracle):
    oracles = [
        Quadratic(np.diag([2.0, -1.0])),
        Quadratic(np.array([[2.0, 1.0], [1.0, 2.0]]), c=[0.3, -0.2], d=1.0),
        PolynomialOracle(2, [(1.0, (3, 0)), (-2.0, (1, 2)), (0.5, (0, 1))]),
        degenerate_oracle,
    ]
    rng = np.random.default_rng(42)
    for oracle in oracles:
        for x in _random_points(oracle, rng):
            gx = oracle.gradient(x)
            scale = max(1.0, float(np.max(np.abs(gx))))
            assert gradient_check(oracle, x, 1e-6) / scale < 1e-5
            hx = oracle.hessian(x)
            hscale = max(1.0, float(np.max(np.abs(hx))))
            assert hessian_check(oracle, x, 1e-4) / hscale < 1e-3
            assert np.max(np.abs(hx - hx.T)) <= 1e-12


def test_staircase_values():
    st = fixtures.staircase()
    assert evaluate(st, [0.0]) == 0.0
    assert evaluate(st, [0.6]) == pytest.approx(0.6**2 + 0.25)
    # 1/4 < 0.3 <= 1/3 -> n = 4
    assert evaluate(st, [0.3]) == pytest.approx(0.3**2 + 0.25 - 0.0625)
    assert evaluate(st, [-0.3]) == evaluate(st, [0.3])
    # right endpoint: the n = 4 piece is (1/4, 1/3], so x = 1/3 uses n = 4
    assert evaluate(st, [1.0 / 3.0]) == pytest.approx((1.0 / 3.0) ** 2 + 0.25 - 0.0625)


def test_klquery_validation():
    f = Smooth(Quadratic(np.eye(2)))
    q = KLQuery(f, [0.0, 0.0])
    assert q.theta == 0.5 and q.radius_eps == 0.1
    with pytest.raises(DomainError):
        KLQuery(f, [0.0, 0.0], theta=1.0)
    with pytest.raises(DomainError):
        KLQuery(f, [0.0, 0.0], radius_eps=0.0)
    with pytest.raises(DimensionMismatch):
        KLQuery(f, [0.0])


def test_structured_function_invariants():
    with pytest.raises(DomainError):
        L1Regularized(Quadratic(np.eye(2)), 0.0)
    with pytest.raises(DomainError):
        LpLeastSquares([[1.0]], [0.0], 1.0, 1.5)
    with pytest.raises(DimensionMismatch):
        MaxOfSmooth((Quadratic(np.eye(2)), Quadratic(np.eye(3))))
    with pytest.raises(DimensionMismatch):
        MaxOfSmooth(())
