"""Closed-form invariant objects of the unit ball.

On the ball the Kobayashi, Caratheodory and Lempert distances coincide.
The complex ellipsoid sum a_j |z_j|^2 < 1 is the image of the ball under
z -> diag(a)^{-1/2} z, so the same formulas give its exact distance and metric.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .curves import SampledCurve
from .domains import DomainSpec, Ellipsoid, UnitBall, as_point, inner, norm
from .errors import CapabilityError, DegeneracyError, DomainError

# ---------------------------------------------------------------------------
# scalar closed forms


def _gap(z):
    """1 - |z|^2 computed as (1 - |z|)(1 + |z|)."""
    r = norm(z)
    return (1.0 - r) * (1.0 + r)


def _check_inside(*points):
    for p in points:
        if np.any(norm(p) >= 1.0):
            raise DomainError("argument is not inside the open unit ball")


def kobayashi_ball(z, w):
    """Invariant distance of the unit ball, vectorized over leading axes.

    Uses s^2 = (|d|^2 (1-|z|^2) + |<z,d>|^2) / |1-<z,w>|^2 with d = w - z,
    so that no cancellation occurs near the sphere.
    """
    z = np.asarray(z, dtype=complex)
    w = np.asarray(w, dtype=complex)
    _check_inside(z, w)
    d = w - z
    az, aw = _gap(z), _gap(w)
    num = np.sum(np.abs(d) ** 2, axis=-1) * az + np.abs(inner(z, d)) ** 2
    den = np.abs(az - inner(z, d))
    s = np.sqrt(num) / den
    one_minus_s2 = az * aw / den ** 2
    return np.log1p(s) - 0.5 * np.log(one_minus_s2)


def royden_ball(z, v):
    """Kobayashi-Royden metric of the unit ball."""
    z = np.asarray(z, dtype=complex)
    v = np.asarray(v, dtype=complex)
    _check_inside(z)
    a = _gap(z)
    return np.sqrt(np.sum(np.abs(v) ** 2, axis=-1) / a + np.abs(inner(v, z)) ** 2 / a ** 2)


def disc_distance(a, b):
    """Poincare distance on the unit disc, arctanh of the pseudo-hyperbolic distance."""
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    return np.arctanh(np.abs(a - b) / np.abs(1 - np.conj(a) * b))


def bergman_ball(z, v):
    """Bergman kernel on the diagonal and Bergman metric of the unit ball."""
    z = as_point(z)
    n = z.shape[-1]
    _check_inside(z)
    kernel = math.factorial(n) / math.pi ** n * _gap(z) ** (-(n + 1))
    return kernel, math.sqrt(n + 1) * royden_ball(z, v)


def bergman_distance_ball(z, w):
    """Bergman distance of the unit ball (a constant multiple of k)."""
    n = np.asarray(z).shape[-1]
    return math.sqrt(n + 1) * kobayashi_ball(z, w)


def bergman_kernel_series(z, terms: int = 200):
    """Diagonal Bergman kernel of the ball from the orthonormal monomial basis.

    K(z) = sum_alpha |z^alpha|^2 / ||z^alpha||^2 with
    ||z^alpha||^2 = pi^N alpha! / (N + |alpha|)!.  Grouping by degree gives
    sum_k (N+k)!/(pi^N k!) |z|^{2k} by the multinomial theorem; the sum over
    alpha is kept explicit for N <= 3 to exercise the basis itself.
    """
    z = as_point(z)
    n = z.size
    total = 0.0
    if n <= 3:
        from itertools import product
        deg = min(terms, 60)
        for alpha in product(range(deg + 1), repeat=n):
            k = sum(alpha)
            if k > deg:
                continue
            mono = np.prod(np.abs(z) ** (2 * np.array(alpha)))
            sq = math.pi ** n * np.prod([math.factorial(a) for a in alpha]) / math.factorial(n + k)
            total += mono / sq
        return float(total)
    r2 = float(np.sum(np.abs(z) ** 2))
    for k in range(terms):
        total += math.factorial(n + k) / (math.pi ** n * math.factorial(k)) * r2 ** k
    return total


# ---------------------------------------------------------------------------
# exact backend for ball-equivalent domains


def _linear_image(domain: DomainSpec):
    if isinstance(domain, UnitBall):
        return np.ones(domain.dimension)
    if isinstance(domain, Ellipsoid):
        return domain.linearization
    raise CapabilityError(f"no exact backend for family {domain.family}")


def has_exact_backend(domain: DomainSpec) -> bool:
    return isinstance(domain, (UnitBall, Ellipsoid))


def kobayashi_exact(domain: DomainSpec, z, w):
    """Exact distance on the ball or on a complex ellipsoid."""
    lin = _linear_image(domain)
    return kobayashi_ball(lin * np.asarray(z, dtype=complex), lin * np.asarray(w, dtype=complex))


def royden_exact(domain: DomainSpec, z, v):
    lin = _linear_image(domain)
    return royden_ball(lin * np.asarray(z, dtype=complex), lin * np.asarray(v, dtype=complex))


def kobayashi_in_ball(z, w, radius: float = 1.0, center=None):
    """Distance in the ball of given radius and center."""
    z = np.asarray(z, dtype=complex)
    w = np.asarray(w, dtype=complex)
    if center is not None:
        z, w = z - center, w - center
    return kobayashi_ball(z / radius, w / radius)


def royden_in_ball(z, v, radius: float = 1.0, center=None):
    z = np.asarray(z, dtype=complex)
    if center is not None:
        z = z - center
    return royden_ball(z / radius, np.asarray(v, dtype=complex) / radius)


# ---------------------------------------------------------------------------
# analytic discs


def _mobius_matrix(p, q):
    """SU(1,1) matrix [[p, q], [conj q, conj p]] normalized to determinant 1."""
    det = abs(p) ** 2 - abs(q) ** 2
    if det <= 0:
        raise DegeneracyError("not a disc automorphism")
    s = math.sqrt(det)
    return np.array([[p / s, q / s], [np.conj(q) / s, np.conj(p) / s]], dtype=complex)


def disc_automorphism(center: complex, rotation: float = 0.0) -> np.ndarray:
    """Matrix of zeta -> e^{i rotation} (zeta + center) / (1 + conj(center) zeta)."""
    if abs(center) >= 1:
        raise DegeneracyError("automorphism center must lie in the open disc")
    rot = np.exp(0.5j * rotation)
    return _mobius_matrix(rot, rot * center)


def apply_mobius(m: np.ndarray, zeta):
    zeta = np.asarray(zeta, dtype=complex)
    return (m[0, 0] * zeta + m[0, 1]) / (m[1, 0] * zeta + m[1, 1])


def mobius_derivative(m: np.ndarray, zeta):
    zeta = np.asarray(zeta, dtype=complex)
    return 1.0 / (m[1, 0] * zeta + m[1, 1]) ** 2


def invert_mobius(m: np.ndarray) -> np.ndarray:
    return np.array([[m[1, 1], -m[0, 1]], [-m[1, 0], m[0, 0]]])


@dataclass(frozen=True)
class DiscMap:
    """phi(zeta) = center + (a * M(zeta) + b) * direction with M a disc automorphism."""

    center: np.ndarray
    direction: np.ndarray
    a: complex
    b: complex = 0.0
    mobius: np.ndarray = field(default_factory=lambda: np.eye(2, dtype=complex))

    def __post_init__(self):
        if abs(self.a) == 0:
            raise DegeneracyError("disc map must be injective (a != 0)")
        d = np.asarray(self.direction, dtype=complex)
        object.__setattr__(self, "direction", d / norm(d))
        object.__setattr__(self, "center", np.asarray(self.center, dtype=complex))

    def __call__(self, zeta):
        zeta = np.asarray(zeta, dtype=complex)
        s = self.a * apply_mobius(self.mobius, zeta) + self.b
        return self.center + s[..., None] * self.direction

    def derivative(self, zeta):
        zeta = np.asarray(zeta, dtype=complex)
        s = self.a * mobius_derivative(self.mobius, zeta)
        return s[..., None] * self.direction

    def preimage(self, z):
        """Parameter of a point lying on the image line."""
        t = (inner(np.asarray(z, dtype=complex) - self.center, self.direction) - self.b) / self.a
        return apply_mobius(invert_mobius(self.mobius), t)

    def precompose(self, m: np.ndarray) -> "DiscMap":
        return DiscMap(self.center, self.direction, self.a, self.b, self.mobius @ m)

    def to_record(self) -> dict:
        c = lambda x: [float(np.real(x)), float(np.imag(x))]
        return {
            "center": [c(x) for x in self.center],
            "direction": [c(x) for x in self.direction],
            "a": c(self.a), "b": c(self.b),
            "mobius": [[c(x) for x in row] for row in self.mobius],
        }


def complex_geodesic_ball(z, w) -> DiscMap:
    """The complex geodesic of the ball through z and w (an affine slice)."""
    z = as_point(z)
    w = as_point(w, z.size)
    _check_inside(z, w)
    diff = w - z
    if norm(diff) < 1e-15:
        raise DegeneracyError("complex geodesic needs distinct points")
    d = diff / norm(diff)
    c = z - inner(z, d) * d
    radius = math.sqrt(max(0.0, 1.0 - float(norm(c)) ** 2))
    return DiscMap(center=c, direction=d, a=radius)


def slice_disc(center, direction) -> DiscMap:
    """Ball slice through the point ``center`` with the given complex direction."""
    direction = as_point(direction)
    d = direction / norm(direction)
    c = as_point(center, d.size)
    c = c - inner(c, d) * d
    if norm(c) >= 1:
        raise DomainError("slice misses the ball")
    return DiscMap(center=c, direction=d, a=math.sqrt(1.0 - float(norm(c)) ** 2))


def real_geodesic_ball(z, w, samples: int = 1001):
    """Unit-speed Kobayashi geodesic of the ball from z to w."""
    if samples < 2:
        raise ValueError("need at least two samples")
    disc = complex_geodesic_ball(z, w)
    zz, zw = complex(disc.preimage(z)), complex(disc.preimage(w))
    # move zz to the origin
    to_origin = _mobius_matrix(1.0, -zz)
    xi = complex(apply_mobius(to_origin, zw))
    length = math.atanh(abs(xi))
    theta = np.angle(xi)
    times = np.linspace(0.0, length, samples)
    back = invert_mobius(to_origin)
    zeta = apply_mobius(back, np.tanh(times) * np.exp(1j * theta))
    pts = disc(zeta)
    pts[0], pts[-1] = as_point(z), as_point(w)
    return SampledCurve(times=times, points=pts)


__all__ = [
    "kobayashi_ball", "royden_ball", "bergman_ball", "bergman_distance_ball",
    "bergman_kernel_series", "disc_distance", "kobayashi_exact", "royden_exact",
    "kobayashi_in_ball", "royden_in_ball", "has_exact_backend", "DiscMap",
    "complex_geodesic_ball", "slice_disc", "real_geodesic_ball",
    "disc_automorphism", "apply_mobius", "mobius_derivative", "invert_mobius",
]
