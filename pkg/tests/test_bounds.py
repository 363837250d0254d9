"""Metric and distance brackets and the estimator formulas."""
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import random_ball_point
from invdist.ball import kobayashi_ball, royden_ball
from invdist.bounds import (BRACKET_AUDIT, EstimatorConstants, IntervalValue, comparison_gap,
                            dini_upper_estimator, g_quantity, kobayashi_interval, kobayashi_lower,
                            kobayashi_upper_path, kobayashi_upper_path_detail, ma_estimator,
                            royden_interval)
from invdist.domains import Ellipsoid, LocalModelS9, PerturbedBall, UnitBall
from invdist.errors import CapabilityError, ConfigurationError, NumericError

BALL = UnitBall(2)
ELL = Ellipsoid(2, coefficients=(1.0, 4.0))


class TestIntervalValue:
    def test_consistent(self):
        assert IntervalValue(1.0, 2.0).consistent
        assert not IntervalValue(2.0, 1.0).consistent

    def test_audit_counts(self):
        before = BRACKET_AUDIT.snapshot()
        IntervalValue(0.0, 1.0)
        IntervalValue(3.0, 1.0)
        after = BRACKET_AUDIT.snapshot()
        assert after["produced"] - before["produced"] == 2
        assert after["violations"] - before["violations"] == 1

    def test_constants(self):
        with pytest.raises(ConfigurationError):
            EstimatorConstants(1.0, 0.5)


class TestRoydenInterval:
    @pytest.mark.parametrize("x", [0.0, 0.4, 0.9])
    def test_ball_example(self, x):
        iv = royden_interval(BALL, [x, 0], [1, 0])
        assert iv.upper == pytest.approx(1 / (1 - x))
        assert iv.contains(1 / (1 - x * x), tol=1e-12)

    def test_center_collapses(self):
        iv = royden_interval(BALL, [0, 0], [0.3, 0.4j])
        assert iv.lower == pytest.approx(0.5)
        assert iv.upper == pytest.approx(0.5)

    def test_brackets_random(self, rng):
        for dom in (BALL, ELL, PerturbedBall(2, amplitude=0.05)):
            for _ in range(20):
                z = random_ball_point(rng, 2, 0.45)
                v = rng.normal(size=2) + 1j * rng.normal(size=2)
                iv = royden_interval(dom, z, v)
                assert iv.consistent

    def test_ellipsoid_ma_factor(self, rng):
        # the exact metric sits inside the bracket and within a fixed factor of the Ma estimator
        ratios = []
        for _ in range(40):
            z = random_ball_point(rng, 2, 0.45)
            v = rng.normal(size=2) + 1j * rng.normal(size=2)
            iv = royden_interval(ELL, z, v)
            ratios.append(iv.upper / ma_estimator(ELL, z, v))
        assert 0 < min(ratios) and max(ratios) < 10

    def test_zero_vector(self):
        with pytest.raises(ConfigurationError):
            royden_interval(BALL, [0, 0], [0, 0])


class TestMaEstimator:
    def test_example(self):
        s = 0.01
        assert ma_estimator(BALL, [1 - s, 0], [1, 0]) == pytest.approx(1 / s + 1 / math.sqrt(s))

    def test_tangential(self):
        assert ma_estimator(BALL, [0.99, 0], [0, 1]) == pytest.approx(1 / math.sqrt(0.01))

    @given(st.floats(0.01, 10))
    def test_homogeneous(self, lam):
        z, v = np.array([0.5, 0.2j]), np.array([0.3, 1 - 1j])
        assert ma_estimator(BALL, z, lam * v) == pytest.approx(lam * ma_estimator(BALL, z, v))

    def test_ratio_bounded_and_stable(self, rng):
        def band(n):
            r = []
            local = np.random.default_rng(3)
            for _ in range(n):
                d = 10 ** local.uniform(-4, math.log10(0.9))
                u = local.normal(size=2) + 1j * local.normal(size=2)
                u /= np.linalg.norm(u)
                v = local.normal(size=2) + 1j * local.normal(size=2)
                z = (1 - d) * u
                r.append(royden_ball(z, v) / ma_estimator(BALL, z, v))
            return min(r), max(r)
        a, b = band(2000), band(4000)
        assert 0 < a[0] and a[1] < np.inf
        assert abs(a[0] - b[0]) / a[0] < 0.1
        assert max(a[1], b[1]) <= 1.0 + 1e-12


class TestDistanceBounds:
    def test_upper_path_example(self):
        up = kobayashi_upper_path(BALL, [0, 0], [0.5, 0], 64, backend="exact-ball")
        assert up == pytest.approx(math.atanh(0.5), abs=5e-3)

    def test_same_point(self):
        assert kobayashi_upper_path(BALL, [0.2, 0], [0.2, 0]) == 0
        assert kobayashi_lower(BALL, [0.2, 0], [0.2, 0]).certified == 0

    def test_lower_is_exact_on_ball(self, rng):
        z, w = random_ball_point(rng, 2), random_ball_point(rng, 2)
        assert kobayashi_lower(BALL, z, w).certified == pytest.approx(kobayashi_ball(z, w))

    def test_convergence_in_segments(self):
        z, w = np.array([0.9, 0]), np.array([0.2, 0.8j])
        vals = [kobayashi_upper_path(BALL, z, w, n, backend="exact-ball") for n in (8, 16, 32, 64)]
        exact = kobayashi_ball(z, w)
        assert all(v >= exact - 1e-9 for v in vals)
        assert abs(vals[-1] - exact) / exact < 5e-3

    def test_ellipsoid_brackets(self, rng):
        for _ in range(10):
            z, w = random_ball_point(rng, 2, 0.45), random_ball_point(rng, 2, 0.45)
            iv = kobayashi_interval(ELL, z, w, segments=16)
            assert iv.consistent

    def test_exact_backend_capability(self):
        with pytest.raises(CapabilityError):
            kobayashi_upper_path(LocalModelS9(), [-0.05, 0], [-0.06, 0.01], 8, backend="exact-ball")

    def test_detail_flags(self):
        res = kobayashi_upper_path_detail(BALL, [0.1, 0], [0.5, 0.5], 16, backend="exact-ball")
        assert res.value <= res.straight_value + 1e-12

    def test_floor(self):
        with pytest.raises(NumericError):
            kobayashi_lower(BALL, [1 - 1e-13, 0], [0, 0])


class TestEstimators:
    def test_dini_example(self):
        assert dini_upper_estimator(BALL, [0, 0], [0.5, 0], 1.0) == pytest.approx(math.log(1 + 0.5 / math.sqrt(0.5)))
        assert dini_upper_estimator(BALL, [0.3, 0], [0.3, 0], 2.0) == 0

    def test_dini_monotone_in_C(self):
        vals = [dini_upper_estimator(BALL, [0.1, 0.2], [0.5, 0], c) for c in (0.1, 1, 10)]
        assert vals == sorted(vals)

    def test_g_quantity(self, rng):
        assert g_quantity(BALL, [0.2, 0], [0.2, 0]) == 0
        worst = 0.0
        for _ in range(2000):
            z, w = random_ball_point(rng, 2, 0.999), random_ball_point(rng, 2, 0.999)
            g = g_quantity(BALL, z, w)
            assert g <= math.sqrt(np.linalg.norm(z - w)) + 1e-15
            worst = max(worst, g)
        assert worst <= math.sqrt(2.0)

    def test_comparison_gap_exact(self):
        rec = comparison_gap(BALL, [0.1, 0], [0.5, 0.1], backend="exact-ball")
        assert (rec.k_minus_c_bound, rec.k_over_c_bound, rec.l_minus_k_bound) == (0.0, 1.0, 0.0)

    def test_comparison_gap_interval(self):
        rec = comparison_gap(ELL, [0.1, 0], [0.3, 0.1], backend="interval", segments=8)
        assert rec.k_minus_c_bound >= 0
        assert rec.k_over_c_bound >= 1
        assert rec.l_minus_k_bound >= 0

    def test_lower_estimators_reported(self):
        lb = kobayashi_lower(BALL, [0.9, 0], [0.9, 0.1], c=0.5)
        assert lb.c == 0.5
        assert lb.estimator_max >= lb.certified
