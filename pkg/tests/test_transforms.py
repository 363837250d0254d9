"""Mobius maps, ball automorphisms, normalizations, normal rays and scaling."""
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import random_ball_point
from invdist.ball import kobayashi_ball
from invdist.curves import SampledCurve
from invdist.domains import Ellipsoid, PerturbedBall, UnitBall, norm
from invdist.errors import ConfigurationError, GeometryError, NumericError, RangeError, SingularityError
from invdist.geometry import boundary_frame
from invdist.transforms import (ball_automorphism, curve_kobayashi_length_upper, mobius,
                                normal_ray_curve, normal_ray_pair_curve, normalize_boundary,
                                normalized_domain, scaling_hausdorff_defect)

ts = st.floats(-0.95, 0.95)


class TestMobius:
    def test_examples(self):
        assert mobius(0.3, 0) == pytest.approx(0.3)
        assert mobius(0.3, -0.3) == pytest.approx(0)
        assert mobius(0.5, 0.5) == pytest.approx(0.8)

    @given(ts, ts, st.complex_numbers(max_magnitude=0.99, allow_nan=False))
    def test_group_law(self, t, s, zeta):
        lhs = mobius(t, mobius(s, zeta))
        rhs = mobius((t + s) / (1 + t * s), zeta)
        assert abs(lhs - rhs) <= 1e-12 * max(1, abs(lhs))

    def test_parameter_range(self):
        with pytest.raises(ConfigurationError):
            mobius(1.0, 0.2)


class TestAutomorphism:
    def test_origin(self):
        assert np.allclose(ball_automorphism(0.4, [0, 0]), [0.4, 0])

    def test_inverse_and_ball(self, rng):
        for _ in range(1000):
            t = rng.uniform(-0.99, 0.99)
            z = random_ball_point(rng, 2, 0.999)
            a = ball_automorphism(t, z)
            assert norm(a) < 1
            assert np.allclose(ball_automorphism(-t, a), z, atol=1e-10)

    @given(ts, st.floats(0, 2 * math.pi), st.floats(0, 2 * math.pi), st.floats(0, math.pi / 2))
    def test_sphere_preserved(self, t, u, v, th):
        z = np.array([math.cos(th) * np.exp(1j * u), math.sin(th) * np.exp(1j * v)])
        if abs(1 + t * z[0]) < 1e-6:
            return
        assert norm(ball_automorphism(t, z)) == pytest.approx(1, abs=1e-12)

    def test_isometry_of_distance(self, rng):
        z, w = random_ball_point(rng, 2), random_ball_point(rng, 2)
        assert kobayashi_ball(ball_automorphism(0.7, z), ball_automorphism(0.7, w)) == pytest.approx(kobayashi_ball(z, w))

    def test_singular(self):
        with pytest.raises(SingularityError):
            ball_automorphism(0.5, [-2, 0])


class TestNormalize:
    def test_identity_at_e1(self):
        m = normalize_boundary(UnitBall(2), [1, 0])
        assert np.allclose(m.unitary, np.eye(2))
        assert np.allclose(m.translation, 0)

    def test_swap_at_e2(self):
        m = normalize_boundary(UnitBall(2), [0, 1])
        assert np.allclose(np.abs(m.unitary), [[0, 1], [1, 0]])
        assert np.allclose(m([0, 1]), [1, 0])

    def test_ellipsoid_second_axis(self):
        dom = Ellipsoid(2, coefficients=(1.0, 4.0))
        p = np.array([0, 0.5])
        mapped = normalized_domain(dom, p, order=1)
        g = mapped.gradient(np.array([1, 0], dtype=complex))
        assert np.allclose(g / norm(g), [1, 0], atol=1e-10)
        assert abs(mapped.rho(np.array([1, 0]))) < 1e-12

    def test_isometry(self, rng):
        dom = PerturbedBall(2, amplitude=0.05)
        p = boundary_frame(dom, random_ball_point(rng, 2, 0.5)).projection
        m = normalize_boundary(dom, p)
        a, b = random_ball_point(rng, 2), random_ball_point(rng, 2)
        assert norm(m(a) - m(b)) == pytest.approx(norm(a - b), abs=1e-12)
        assert np.allclose(m.inverse(m(a)), a)

    def test_off_boundary(self):
        with pytest.raises(GeometryError):
            normalize_boundary(UnitBall(2), [0.5, 0])


class TestNormalRays:
    def test_ball_endpoint(self):
        c = normal_ray_curve(UnitBall(2), [0.5, 0], 0.2)
        assert np.allclose(c.points[0], [0.5, 0])
        assert np.allclose(c.points[-1], [0.3, 0])

    def test_zero_length(self):
        c = normal_ray_curve(UnitBall(2), [0.5, 0], 0.0)
        assert len(c) == 1
        assert curve_kobayashi_length_upper(UnitBall(2), c) == 0.0

    def test_range_error(self):
        with pytest.raises(RangeError) as info:
            normal_ray_curve(UnitBall(2), [0.5, 0], 2.0)
        assert info.value.max_parameter == pytest.approx(1.5)

    def test_ellipsoid_delta_increases(self):
        dom = Ellipsoid(2, coefficients=(1.0, 4.0))
        z = np.array([0.5, 0.3j])
        c = normal_ray_curve(dom, z, 0.1, samples=11)
        assert boundary_frame(dom, c.points[-1]).delta > boundary_frame(dom, z).delta

    def test_ball_delta_monotone(self):
        c = normal_ray_curve(UnitBall(2), [0.3, 0.6j], 0.5, samples=51)
        d = 1 - norm(c.points)
        assert np.all(np.diff(d) > 0)

    def test_radial_length(self):
        c = normal_ray_curve(UnitBall(2), [0.5, 0], 0.2, samples=10001)
        assert curve_kobayashi_length_upper(UnitBall(2), c) == pytest.approx(math.log(0.7 / 0.5), abs=1e-3)

    def test_length_dominates_distance(self, rng):
        for _ in range(5):
            z, w = random_ball_point(rng, 2, 0.9), random_ball_point(rng, 2, 0.9)
            t = np.linspace(0, 1, 51)
            c = SampledCurve(t, z[None, :] + t[:, None] * (w - z)[None, :])
            assert curve_kobayashi_length_upper(UnitBall(2), c) >= kobayashi_ball(z, w) - 1e-9

    def test_floor(self):
        c = SampledCurve(np.array([0.0, 1.0]), np.array([[0.5, 0], [1 - 1e-13, 0]]))
        with pytest.raises(NumericError):
            curve_kobayashi_length_upper(UnitBall(2), c)

    def test_pair_curve_has_break(self):
        c = normal_ray_pair_curve(UnitBall(2), [0.9, 0], [0.8, 0.3], fraction=1.0)
        assert len(c.breaks) == 1
        assert np.all(np.diff(c.times) > 0)

    def test_csv(self):
        text = normal_ray_curve(UnitBall(2), [0.5, 0], 0.2, samples=3).to_csv()
        assert text.splitlines()[0] == "time,x1,x2,y1,y2"
        assert len(text.splitlines()) == 4


class TestScaling:
    def test_ball_zero(self):
        for t in (0.0, 0.5, 0.99):
            assert scaling_hausdorff_defect(UnitBall(2), t) < 1e-12

    def test_identity_at_zero(self):
        dom = Ellipsoid(2, coefficients=(1.0, 4.0))
        # ellipsoid boundary lies between radius 1/2 and 1 in the half-space Re z1 > -1/2
        d0 = scaling_hausdorff_defect(dom, 0.0)
        assert 0 < d0 <= 0.5 + 1e-9

    def test_ellipsoid_decreases(self):
        p = np.array([0.6, 0.4j])
        p = p / math.sqrt(0.36 + 4 * 0.16)
        dom = normalized_domain(Ellipsoid(2, coefficients=(1.0, 4.0)), p, order=2)
        vals = [scaling_hausdorff_defect(dom, t) for t in (0.9, 0.99, 0.999)]
        assert vals[0] > vals[1] > vals[2]
