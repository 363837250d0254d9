"""Boundary-distance estimators, the local-model sequence and SLC scans."""
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import random_ball_point
from invdist.bounds import EstimatorConstants
from invdist.domains import Ellipsoid, LocalModelS9, UnitBall
from invdist.errors import GeometryError, SamplingError
from invdist.estimators import (a_quantity, batch_quantities, cc_proxy, g_balogh_bonk,
                                h_quantities, pair_quantities, s9_ratios, s9_sequence,
                                sandwich, slc_ratio_scan)

BALL = UnitBall(2)
ELL = Ellipsoid(2, coefficients=(1.0, 4.0))

ball_points = st.tuples(st.floats(0.0, 0.95), st.floats(0, 2 * math.pi),
                        st.floats(0, 2 * math.pi), st.floats(0, math.pi / 2)).map(
    lambda t: t[0] * np.array([math.cos(t[3]) * np.exp(1j * t[1]),
                               math.sin(t[3]) * np.exp(1j * t[2])]))


class TestA:
    def test_example(self):
        expected = (0.5 + 0.25 + 0.5 * math.sqrt(0.5)) / math.sqrt(0.5)
        assert a_quantity(BALL, [0.5, 0], [0, 0]) == pytest.approx(expected)
        assert expected == pytest.approx(1.5607, abs=1e-4)

    def test_same_point(self):
        assert a_quantity(BALL, [0.3, 0.1j], [0.3, 0.1j]) == 0

    def test_frame_side(self):
        # A takes the frame at its first argument, so it is not symmetric
        z, w = np.array([0.9, 0]), np.array([0, 0.5])
        assert a_quantity(BALL, z, w) != pytest.approx(a_quantity(BALL, w, z))

    def test_batch_matches_scalar(self, rng):
        z = np.array([random_ball_point(rng, 2) for _ in range(20)])
        w = np.array([random_ball_point(rng, 2) for _ in range(20)])
        batch = batch_quantities(BALL, z, w)
        for i in range(20):
            q = pair_quantities(BALL, z[i], w[i])
            assert batch["A"][i] == pytest.approx(q.A, rel=1e-10)
            assert batch["h"][i] == pytest.approx(q.h, rel=1e-10)

    @given(ball_points, ball_points)
    def test_nonnegative(self, z, w):
        assert a_quantity(BALL, z, w) >= 0


class TestSandwich:
    def test_zero(self):
        assert sandwich(0.0, EstimatorConstants(0.5, 2.0)) == (0.0, 0.0)

    @given(st.floats(0, 1e6))
    def test_ordered(self, a):
        lo, hi = sandwich(a, EstimatorConstants(0.3, 3.0))
        assert 0 <= lo <= hi

    def test_negative(self):
        with pytest.raises(ValueError):
            sandwich(-1.0, EstimatorConstants(0.5, 1.0))


class TestProxies:
    def test_cc_example(self):
        assert cc_proxy(BALL, [1, 0], [0, 1]) == pytest.approx(math.sqrt(3))
        assert cc_proxy(BALL, [1, 0], [1, 0]) == 0

    def test_cc_off_boundary(self):
        with pytest.raises(GeometryError):
            cc_proxy(BALL, [0.5, 0], [0, 1])

    def test_cc_symmetry_defect_shrinks(self):
        # exact symmetry on the ball, so the scan runs on the ellipsoid
        def on_ell(x):
            return x / np.sqrt(np.abs(x[0]) ** 2 + 4 * np.abs(x[1]) ** 2)
        p = on_ell(np.array([0.6, 0.2 + 0.1j]))
        defects = []
        for t in (0.1, 0.01, 0.001):
            q = on_ell(p + t * np.array([0.3j, 0.5]))
            a, b = cc_proxy(ELL, p, q), cc_proxy(ELL, q, p)
            defects.append(abs(a - b) / a)
        assert defects[0] > defects[1] > defects[2]

    def test_cc_square_identity(self, rng):
        for _ in range(20):
            p = random_ball_point(rng, 2)
            q = random_ball_point(rng, 2)
            p, q = p / np.linalg.norm(p), q / np.linalg.norm(q)
            d = p - q
            exact = abs(np.vdot(p, d)) + np.linalg.norm(d) ** 2
            assert cc_proxy(BALL, p, q) ** 2 == pytest.approx(exact, rel=1e-12)

    def test_g_example(self):
        expected = math.log(0.75 / (math.sqrt(0.5) * math.sqrt(0.75)))
        assert g_balogh_bonk(BALL, [0.5, 0], [0.25, 0]) == pytest.approx(expected)

    def test_g_same_point(self):
        assert g_balogh_bonk(BALL, [0.4, 0.3j], [0.4, 0.3j]) == pytest.approx(0.0, abs=1e-12)

    def test_g_nonunique(self):
        with pytest.raises(GeometryError):
            g_balogh_bonk(BALL, [0, 0], [0.5, 0])


class TestH:
    def test_same_point(self):
        assert h_quantities(BALL, [0.2, 0], [0.2, 0]) == (0.0, 0.0)

    @given(ball_points, ball_points)
    def test_real_part_dominated(self, z, w):
        h, hr = h_quantities(BALL, z, w) if np.linalg.norm(z) > 1e-9 else (0.0, 0.0)
        assert h - hr >= -1e-12

    def test_s9_sequence_interior(self):
        dom = LocalModelS9()
        for z, w in s9_sequence([0.1, 0.05, 0.025]):
            assert dom.rho(z) < 0 and dom.rho(w) < 0

    @pytest.mark.parametrize("exponent", [3.0, 4.0])
    def test_s9_ratio_decreases(self, exponent):
        r = [row["ratio"] for row in s9_ratios(0.1 * 0.5 ** np.arange(4), exponent)]
        assert all(a > b for a, b in zip(r, r[1:]))
        assert r[-1] < 0.5 * r[0]


class TestSLCScan:
    radii = (0.2, 0.1, 0.05, 0.025)

    def test_ball_c3(self):
        rows = slc_ratio_scan(BALL, [1, 0], self.radii)
        assert rows[-1]["c3_est"] == pytest.approx(0.5, rel=0.1)

    def test_s9_c4_vanishes(self):
        rows = slc_ratio_scan(LocalModelS9(), [0, 0], (0.1, 0.05, 0.025))
        assert rows[-1]["c4_est"] <= 0.1 * max(rows[0]["c4_est"], 1e-300) or rows[-1]["c4_est"] < 1e-6

    def test_ellipsoid_c2_le_c3(self):
        rows = slc_ratio_scan(ELL, [1, 0], self.radii)
        for row in rows:
            assert row["c2_est"] <= row["c3_est"] + 1e-15

    def test_deterministic(self):
        a = slc_ratio_scan(ELL, [1, 0], (0.1,), seed=4)
        b = slc_ratio_scan(ELL, [1, 0], (0.1,), seed=4)
        assert a == b

    def test_not_on_boundary(self):
        with pytest.raises(GeometryError):
            slc_ratio_scan(BALL, [0.5, 0], self.radii)

    def test_empty_shell(self):
        with pytest.raises(SamplingError):
            slc_ratio_scan(BALL, [1, 0], (100.0,))
