import math

import numpy as np
import pytest

from kl_analyzer import certify, fixtures, sampler
from kl_analyzer.errors import EmptyBudget, InsufficientSamples
from kl_analyzer.model import KLQuery, LpLeastSquares, Quadratic, Smooth
from kl_analyzer.sampler import (
    CLASS_DIVERGENT,
    CLASS_FINITE_POSITIVE,
    GridSpec,
    SampleBudget,
    check_W_nonempty,
    estimate_exponent,
    estimate_modulus,
    estimate_theta_subderivative,
)

DIAG_DIR = np.array([-1.0, -1.0]) / math.sqrt(2.0)
ANTI_DIR = np.array([1.0, -1.0]) / math.sqrt(2.0)


def small_budget(**kw):
    base = dict(radius_eps=0.1, num_levels=8, samples_per_level=400, seed=7)
    base.update(kw)
    return SampleBudget(**base)


class TestEstimateModulus:
    def test_identity_quadratic(self):
        q = KLQuery(fixtures.smooth_identity(), [0.0, 0.0])
        est, records = estimate_modulus(q, small_budget())
        assert est == pytest.approx(math.sqrt(0.5), rel=0.05)
        assert est >= math.sqrt(0.5) - 1e-12  # sampled min cannot undershoot
        assert len(records) > 1000

    def test_indefinite_quadratic(self):
        q = KLQuery(fixtures.smooth_indefinite(), [0.0, 0.0])
        est, _ = estimate_modulus(q, small_budget(samples_per_level=1000))
        assert est == pytest.approx(1.0, rel=0.05)

    def test_ratio_fields_consistent(self):
        q = KLQuery(fixtures.smooth_identity(), [0.0, 0.0], theta=0.25)
        est, records = estimate_modulus(q, small_budget(samples_per_level=50))
        for r in records:
            assert r.gap > 0.0
            assert r.ratio == (1.0 - 0.25) * r.dist / r.gap**0.25
            assert r.ratio >= 0.0
        assert est <= min(x.ratio for x in records) + 1e-15 or est == math.inf

    def test_estimate_uses_innermost_annuli(self):
        q = KLQuery(fixtures.smooth_identity(), [0.0, 0.0])
        budget = small_budget(samples_per_level=100)
        est, records = estimate_modulus(q, budget)
        inner = [r for r in records if r.radius <= 0.1 * 2.0**-7]
        assert est <= min(r.ratio for r in inner) + 1e-15

    def test_level_window_filters(self):
        # nu small enough excludes the outer annuli entirely
        q = KLQuery(fixtures.smooth_identity(), [0.0, 0.0], level_nu=1e-6)
        est, records = estimate_modulus(q, small_budget(samples_per_level=100))
        assert all(r.gap < 1e-6 for r in records)
        assert math.isfinite(est)

    def test_no_samples_above_gives_inf(self):
        # strict local max: every gap is negative
        q = KLQuery(Smooth(Quadratic(-np.eye(2))), [0.0, 0.0])
        est, records = estimate_modulus(q, small_budget(samples_per_level=50))
        assert est == math.inf
        assert records == []

    def test_determinism(self):
        q = KLQuery(fixtures.smooth_indefinite(), [0.0, 0.0])
        e1, r1 = estimate_modulus(q, small_budget())
        e2, r2 = estimate_modulus(q, small_budget())
        assert e1 == e2 and len(r1) == len(r2)
        assert all(np.array_equal(a.x, b.x) and a.ratio == b.ratio for a, b in zip(r1, r2))

    def test_seed_sensitivity(self):
        q = KLQuery(fixtures.smooth_indefinite(), [0.0, 0.0])
        e1, _ = estimate_modulus(q, small_budget(seed=1))
        e2, _ = estimate_modulus(q, small_budget(seed=2))
        assert e1 != e2

    def test_thread_pool_identical_records(self, monkeypatch):
        q = KLQuery(fixtures.smooth_indefinite(), [0.0, 0.0])
        e1, r1 = estimate_modulus(q, small_budget(samples_per_level=200))
        monkeypatch.setenv("KL_ANALYZER_THREADS", "3")
        e2, r2 = estimate_modulus(q, small_budget(samples_per_level=200))
        assert e1 == e2 and len(r1) == len(r2)
        assert all(np.array_equal(a.x, b.x) and a.ratio == b.ratio for a, b in zip(r1, r2))

    def test_refinement_never_increases_much(self):
        for seed in range(5):
            q = KLQuery(fixtures.smooth_identity(), [0.0, 0.0])
            coarse, _ = estimate_modulus(q, small_budget(seed=seed, num_levels=5))
            fine, _ = estimate_modulus(q, small_budget(seed=seed, num_levels=10))
            assert fine <= coarse + 0.02

    def test_directed_sampling_on_flat_curve(self, degenerate_smooth, degenerate_xbar):
        q = KLQuery(degenerate_smooth, degenerate_xbar, radius_eps=1e-2)
        budget = SampleBudget(radius_eps=1e-2, num_levels=8, samples_per_level=64, seed=7, direction=DIAG_DIR)
        est, records = estimate_modulus(q, budget)
        assert est < 0.05
        assert all(r.gap > 0 for r in records)

    def test_staircase_small_for_every_theta(self):
        st = fixtures.staircase()
        for theta in (0.0, 0.25, 0.5, 0.75):
            q = KLQuery(st, [0.0], theta=theta, radius_eps=1e-3)
            est, _ = estimate_modulus(q, SampleBudget(1e-3, 10, 300, seed=7))
            assert est < 0.05

    def test_max_class_agreement(self):
        q = KLQuery(fixtures.two_ball_max(), [0.0, 0.0])
        est, _ = estimate_modulus(q, small_budget(samples_per_level=500))
        assert est == pytest.approx(1.0, rel=0.05)

    def test_l1_agreement(self):
        f, xbar = fixtures.l1_interior_fixture()
        q = KLQuery(f, xbar)
        est, _ = estimate_modulus(q, small_budget(samples_per_level=800))
        assert est == pytest.approx(math.sqrt(0.5), rel=0.05)

    def test_lp_support_masking_present(self):
        f = LpLeastSquares([[1.0, 0.7]], [3.0], 1.0, 0.5)
        from conftest import lp_scalar_stationary_point

        t = lp_scalar_stationary_point()
        q = KLQuery(f, [t, 0.0])
        est, records = estimate_modulus(q, small_budget(samples_per_level=600))
        masked = [r for r in records if r.x[1] == 0.0]
        unmasked = [r for r in records if r.x[1] != 0.0]
        assert masked and unmasked
        cert = certify.certify_lp(f, [t, 0.0])
        assert est == pytest.approx(cert.modulus, rel=0.05)

    def test_empty_budget(self):
        with pytest.raises(EmptyBudget):
            SampleBudget(samples_per_level=0)
        with pytest.raises(EmptyBudget):
            SampleBudget(radius_eps=0.0)


class TestEstimateExponent:
    def test_identity_quadratic_half(self):
        q = KLQuery(fixtures.smooth_identity(), [0.0, 0.0])
        _, records = estimate_modulus(q, small_budget(samples_per_level=500))
        theta_hat, r2 = estimate_exponent(q.function, [0.0, 0.0], records=records)
        assert 0.45 <= theta_hat <= 0.55
        assert r2 >= 0.9

    def test_degenerate_fixture_two_thirds(self, degenerate_smooth, degenerate_xbar):
        budget = SampleBudget(0.1, 10, 200, seed=7, direction=DIAG_DIR)
        q = KLQuery(degenerate_smooth, degenerate_xbar)
        _, records = estimate_modulus(q, budget)
        theta_hat, r2 = estimate_exponent(degenerate_smooth, degenerate_xbar, records=records)
        assert 0.60 <= theta_hat <= 0.73
        assert r2 >= 0.9

    def test_lp_zero_negative_slope(self):
        f = LpLeastSquares([[1.0, 0.3], [0.2, 0.9]], [0.1, -0.2], 1.0, 0.5)
        q = KLQuery(f, [0.0, 0.0], radius_eps=1e-2)
        _, records = estimate_modulus(q, SampleBudget(1e-2, 8, 500, seed=3))
        theta_hat, _ = estimate_exponent(f, [0.0, 0.0], records=records)
        assert theta_hat < 0.0

    def test_insufficient_samples(self):
        q = KLQuery(Smooth(Quadratic(-np.eye(2))), [0.0, 0.0])
        _, records = estimate_modulus(q, small_budget(samples_per_level=30))
        with pytest.raises(InsufficientSamples):
            estimate_exponent(q.function, [0.0, 0.0], records=records)


class TestThetaSubderivative:
    def test_quadratic_second_subderivative(self):
        qd = fixtures.smooth_indefinite()
        est = estimate_theta_subderivative(qd, [0.0, 0.0], [1.0, 0.0], 0.5)
        assert est.liminf_estimate == pytest.approx(2.0, rel=1e-3)
        assert est.classification == CLASS_FINITE_POSITIVE

    def test_quotients_stored_exactly(self):
        qd = fixtures.smooth_identity()
        grid = GridSpec(taus=(0.1, 0.05), delta=1e-3, num_directions=2)
        est = estimate_theta_subderivative(qd, [0.0, 0.0], [1.0, 0.0], 0.5, grid)
        # first probe is w itself: value w^T Q w / tau-normalization
        for t, tau in enumerate(grid.taus):
            want = (0.5 * tau**2) / (0.5 * tau**2)
            assert est.quotients[t, 0] == pytest.approx(want, abs=1e-12)

    def test_positive_homogeneity(self):
        qd = fixtures.smooth_indefinite()
        e1 = estimate_theta_subderivative(qd, [0.0, 0.0], [1.0, 0.0], 0.5)
        e2 = estimate_theta_subderivative(qd, [0.0, 0.0], [2.0, 0.0], 0.5)
        assert e2.liminf_estimate == pytest.approx(4.0 * e1.liminf_estimate, rel=1e-3)

    def test_degenerate_fixture_formula(self, degenerate_smooth, degenerate_xbar):
        est = estimate_theta_subderivative(degenerate_smooth, degenerate_xbar, DIAG_DIR, 2.0 / 3.0)
        assert est.liminf_estimate == pytest.approx(3.0 / math.sqrt(2.0), rel=0.02)
        assert est.classification == CLASS_FINITE_POSITIVE

    def test_degenerate_fixture_divergent_direction(self, degenerate_smooth, degenerate_xbar):
        est = estimate_theta_subderivative(degenerate_smooth, degenerate_xbar, ANTI_DIR, 2.0 / 3.0)
        assert est.classification == CLASS_DIVERGENT

    def test_grid_refinement_converges(self, degenerate_smooth, degenerate_xbar):
        errors = []
        for delta in (1e-2, 1e-3, 1e-4):
            grid = GridSpec(delta=delta)
            est = estimate_theta_subderivative(degenerate_smooth, degenerate_xbar, DIAG_DIR, 2.0 / 3.0, grid)
            errors.append(abs(est.liminf_estimate - 3.0 / math.sqrt(2.0)))
        assert errors[-1] <= 0.02 * (3.0 / math.sqrt(2.0))
        assert errors[-1] <= errors[0] + 1e-12


class TestWitnessSearch:
    def test_indefinite_witness(self):
        qd = fixtures.smooth_indefinite()
        out = check_W_nonempty(qd, [0.0, 0.0], 0.5, [np.array([1.0, 0.0]), np.array([0.0, 1.0])])
        assert out is not None
        w, value = out
        assert np.allclose(w, [1.0, 0.0])
        assert value == pytest.approx(2.0, rel=1e-3)

    def test_negative_definite_no_witness(self):
        f = Smooth(Quadratic(-np.eye(2)))
        out = check_W_nonempty(f, [0.0, 0.0], 0.5, [np.array([1.0, 0.0]), np.array([0.0, 1.0])])
        assert out is None

    def test_degenerate_fixture_witness(self, degenerate_smooth, degenerate_xbar):
        out = check_W_nonempty(degenerate_smooth, degenerate_xbar, 2.0 / 3.0, [ANTI_DIR, DIAG_DIR])
        assert out is not None
        w, _ = out
        assert np.allclose(w, DIAG_DIR)


class TestModelModulusInequality:
    def test_sampled_at_most_model_modulus_smooth(self):
        # sampled half-exponent estimate <= sqrt(lam_min^+/2) + band
        fixtures_list = [
            fixtures.smooth_identity(),
            fixtures.smooth_indefinite(),
            Smooth(Quadratic(np.array([[2.0, 1.0], [1.0, 2.0]]))),
        ]
        for f in fixtures_list:
            h = f.oracle.hessian(np.zeros(2))
            model_modulus, _, _ = certify.modulus_from_curvature(h)
            q = KLQuery(f, [0.0, 0.0])
            est, _ = estimate_modulus(q, small_budget(samples_per_level=300))
            assert est <= model_modulus + 0.05 * model_modulus

    def test_degenerate_fixture_strict_gap(self, degenerate_smooth, degenerate_xbar):
        # model modulus sqrt(2); the sampled estimate along the flat
        # direction is far below it
        h = degenerate_smooth.oracle.hessian(degenerate_xbar)
        model_modulus, _, _ = certify.modulus_from_curvature(h)
        assert model_modulus == pytest.approx(math.sqrt(2.0), abs=1e-12)
        q = KLQuery(degenerate_smooth, degenerate_xbar, radius_eps=1e-2)
        budget = SampleBudget(1e-2, 8, 64, seed=7, direction=DIAG_DIR)
        est, _ = estimate_modulus(q, budget)
        assert est <= model_modulus
        assert est < 0.05
