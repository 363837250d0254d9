"""Disc invariants, max-delta reparametrization and curve length ratios."""
import math
import warnings

import numpy as np
import pytest

from conftest import random_ball_point, random_unitary
from invdist.ball import complex_geodesic_ball, disc_automorphism, real_geodesic_ball, slice_disc
from invdist.curves import SampledCurve
from invdist.domains import UnitBall
from invdist.errors import DegeneracyError, DomainError
from invdist.geodesics import (ResolutionWarning, boundary_normal_share, disc_invariants,
                               length_ratios, reparametrize_max_delta, theorem5_balance)

BALL = UnitBall(2)
E1, E2 = np.array([1, 0], dtype=complex), np.array([0, 1], dtype=complex)


def chord_width(s):
    """Euclidean diameter of the ball slice at height 1 - s."""
    return 2 * math.sqrt(2 * s - s * s)


class TestInvariants:
    def test_diameter_disc(self):
        inv = disc_invariants(BALL, slice_disc([0, 0], E1))
        assert inv.diameter == pytest.approx(2.0)
        assert inv.max_delta == pytest.approx(1.0)
        assert inv.max_derivative == pytest.approx(1.0)

    @pytest.mark.parametrize("s", [1e-4, 1e-2, 0.3])
    def test_small_slice(self, s):
        inv = disc_invariants(BALL, slice_disc([1 - s, 0], E2))
        assert inv.diameter == pytest.approx(chord_width(s), rel=1e-9)
        assert inv.max_delta == pytest.approx(s, rel=1e-9)
        assert inv.diameter / math.sqrt(inv.max_delta) == pytest.approx(2 * math.sqrt(2 - s), rel=1e-9)
        assert inv.tangency_defect < 1e-12

    def test_coarse_grid_warns(self):
        disc = slice_disc([0.2, 0], np.array([0.6, 0.8]))
        with pytest.warns(ResolutionWarning):
            disc_invariants(BALL, disc.precompose(disc_automorphism(0.9)), grid=6)

    def test_fine_grid_quiet(self):
        with warnings.catch_warnings():
            warnings.simplefilter("error")
            disc_invariants(BALL, slice_disc([0.5, 0], E2))

    def test_grid_too_small(self):
        with pytest.raises(ValueError):
            disc_invariants(BALL, slice_disc([0, 0], E1), grid=2)


class TestReparametrize:
    def test_diameter_disc_fixed(self):
        disc = slice_disc([0, 0], E1)
        out = reparametrize_max_delta(BALL, disc)
        assert np.allclose(out(0.0), 0.0, atol=1e-9)

    def test_tangency_after_shift(self, rng):
        for _ in range(20):
            c = random_ball_point(rng, 2, 0.9)
            d = rng.normal(size=2) + 1j * rng.normal(size=2)
            disc = slice_disc(c, d).precompose(disc_automorphism(0.6 * np.exp(1j * rng.uniform(0, 6.28))))
            out = reparametrize_max_delta(BALL, disc)
            inv = disc_invariants(BALL, out)
            assert inv.tangency_defect <= 1e-6
            # the slice center is the closest point to the origin
            assert np.allclose(out(0.0), disc.center, atol=1e-6)

    def test_idempotent(self):
        disc = slice_disc([0.3, 0.4j], [1, 1j]).precompose(disc_automorphism(0.5))
        once = reparametrize_max_delta(BALL, disc)
        twice = reparametrize_max_delta(BALL, once)
        assert np.linalg.norm(once(0.0) - twice(0.0)) <= 1e-8


class TestBalance:
    def test_example(self):
        disc = slice_disc([0, 0], E1)
        expected = (1 + math.sqrt(0.9) + 0.4) / 2
        assert theorem5_balance(BALL, disc, [0.1, 0], [0.5, 0]) == pytest.approx(expected)
        assert expected == pytest.approx(1.17434, abs=1e-5)

    def test_unitary_invariance(self, rng):
        z, w = random_ball_point(rng, 2, 0.9), random_ball_point(rng, 2, 0.9)
        u = random_unitary(rng, 2)
        a = theorem5_balance(BALL, complex_geodesic_ball(z, w), z, w)
        b = theorem5_balance(BALL, complex_geodesic_ball(u @ z, u @ w), u @ z, u @ w)
        assert a == pytest.approx(b, rel=1e-9)

    def test_equal_points(self):
        with pytest.raises(DegeneracyError):
            theorem5_balance(BALL, slice_disc([0, 0], E1), [0.2, 0], [0.2, 0])

    def test_point_off_disc(self):
        with pytest.raises(DomainError):
            theorem5_balance(BALL, slice_disc([0, 0], E1), [0.2, 0], [0, 0.3])

    def test_boundary_share_band(self, rng):
        shares = []
        for s in (1e-3, 1e-2, 0.1, 0.5):
            disc = slice_disc([1 - s, 0], E2)
            d_e = disc_invariants(BALL, disc).diameter
            shares.append(np.max(boundary_normal_share(BALL, disc)) / d_e)
        assert 0 < min(shares) and max(shares) / min(shares) < 10


class TestLengthRatios:
    def test_diameter_segment(self):
        t = np.linspace(0, 1, 101)
        pts = np.stack([-0.9 + 1.8 * t, 0 * t], axis=1).astype(complex)
        r = length_ratios(BALL, SampledCurve(times=t, points=pts))
        assert r["gehring"] == pytest.approx(1.0)
        assert r["prop3"] == pytest.approx(1.8)

    def test_gehring_bound(self, rng):
        for _ in range(30):
            z, w = random_ball_point(rng, 2, 0.999), random_ball_point(rng, 2, 0.999)
            r = length_ratios(BALL, real_geodesic_ball(z, w, samples=801))
            assert 1.0 - 1e-9 <= r["gehring"] <= math.pi / 2 + 0.01

    def test_zero_gap(self):
        pts = np.array([[0.1, 0], [0.2, 0], [0.1, 0]], dtype=complex)
        with pytest.raises(DegeneracyError):
            length_ratios(BALL, SampledCurve(times=np.arange(3.0), points=pts))
