"""Mobius maps, ball automorphisms, boundary normalizations and normal rays."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .bounds import metric_function
from .curves import SampledCurve, curve_length
from .domains import (DomainSpec, MappedDomain, UnitBall, as_point, inner,
                      norm, realify, to_real, unit)
from .errors import (ConfigurationError, GeometryError, NumericError,
                     RangeError, SingularityError)
from .geometry import DELTA_FLOOR, boundary_frame, raycast

SINGULAR_TOL = 1e-14


def _check_t(t):
    if not -1.0 < t < 1.0:
        raise ConfigurationError("scaling parameter must satisfy |t| < 1")


def mobius(t: float, zeta):
    """m_t(zeta) = (zeta + t) / (1 + t zeta)."""
    _check_t(t)
    zeta = np.asarray(zeta, dtype=complex)
    return (zeta + t) / (1.0 + t * zeta)


def _automorphism_raw(t, z):
    z = np.asarray(z, dtype=complex)
    den = 1.0 + t * z[..., 0]
    out = np.empty_like(z)
    with np.errstate(divide="ignore", invalid="ignore"):
        out[..., 0] = (z[..., 0] + t) / den
        out[..., 1:] = math.sqrt(1.0 - t * t) * z[..., 1:] / den[..., None]
    return out, den


def ball_automorphism(t: float, z):
    """A_t(z) = (m_t(z_1), sqrt(1 - t^2) z' / (1 + t z_1)); A_t^{-1} = A_{-t}."""
    _check_t(t)
    out, den = _automorphism_raw(t, z)
    if np.any(np.abs(den) < SINGULAR_TOL):
        raise SingularityError("1 + t z_1 vanishes")
    return out


# ---------------------------------------------------------------------------
# rigid normalization


@dataclass(frozen=True)
class RigidMap:
    """z -> unitary @ z + translation."""

    unitary: np.ndarray
    translation: np.ndarray

    def __post_init__(self):
        u = np.asarray(self.unitary, dtype=complex)
        if np.max(np.abs(u.conj().T @ u - np.eye(u.shape[0]))) > 1e-12:
            raise GeometryError("rigid map needs a unitary matrix")
        object.__setattr__(self, "unitary", u)
        object.__setattr__(self, "translation", np.asarray(self.translation, dtype=complex))

    def forward(self, z):
        return np.asarray(z, dtype=complex) @ self.unitary.T + self.translation

    __call__ = forward

    def inverse(self, w):
        return (np.asarray(w, dtype=complex) - self.translation) @ self.unitary.conj()

    def inverse_jacobian(self, w):
        w = np.asarray(w)
        j = self.unitary.conj().T
        return np.broadcast_to(j, w.shape[:-1] + j.shape)


def _adapted_basis(eta):
    """Orthonormal basis with first vector eta; the rest from Gram-Schmidt of e_k."""
    n = eta.size
    drop = int(np.argmax(np.abs(eta)))
    vecs = [eta]
    for k in range(n):
        if k == drop:
            continue
        v = unit(k, n)
        for b in vecs:
            v = v - inner(v, b) * b
        vecs.append(v / norm(v))
    return np.column_stack(vecs)


def normalize_boundary(domain: DomainSpec, p) -> RigidMap:
    """Rigid map sending p to e_1 and the outer normal at p to e_1."""
    p = as_point(p, domain.dimension)
    if abs(float(domain.rho(p))) > 1e-8:
        raise GeometryError("normalization point is not on the boundary")
    g = domain.gradient(p)
    if norm(g) == 0:
        raise GeometryError("degenerate gradient")
    eta = g / norm(g)
    basis = _adapted_basis(eta)
    u = basis.conj().T
    return RigidMap(u, unit(0, domain.dimension) - u @ p)


# ---------------------------------------------------------------------------
# second order normalization


def holomorphic_hessian(real_hessian: np.ndarray) -> np.ndarray:
    """d^2 f / dz_j dz_k from the real Hessian in [x, y] ordering."""
    n = real_hessian.shape[0] // 2
    hxx = real_hessian[:n, :n]
    hyy = real_hessian[n:, n:]
    hxy = real_hessian[:n, n:]
    return 0.25 * (hxx - hyy - 1j * (hxy + hxy.T))


@dataclass(frozen=True)
class OsculatingMap:
    """Rigid normalization followed by a tangential Levi scaling and a quadratic shear.

    In coordinates w = rigid(z) - e_1 and u = map(z) - e_1,
    w = (u_1 - u'^T Q u' / 2, M u'), chosen so that the normalized defining
    function reads 2 Re u_1 + |u'|^2 + higher weighted order.
    """

    rigid: RigidMap
    scale: np.ndarray
    shear: np.ndarray

    def forward(self, z):
        w = self.rigid.forward(z) - unit(0, self.rigid.unitary.shape[0])
        up = w[..., 1:] @ np.linalg.inv(self.scale).T
        quad = np.einsum("...j,jk,...k->...", up, self.shear, up)
        u = np.concatenate([(w[..., 0] + 0.5 * quad)[..., None], up], axis=-1)
        return u + unit(0, u.shape[-1])

    __call__ = forward

    def inverse(self, zeta):
        u = np.asarray(zeta, dtype=complex) - unit(0, self.rigid.unitary.shape[0])
        up = u[..., 1:]
        quad = np.einsum("...j,jk,...k->...", up, self.shear, up)
        w = np.concatenate([(u[..., 0] - 0.5 * quad)[..., None], up @ self.scale.T], axis=-1)
        return self.rigid.inverse(w + unit(0, w.shape[-1]))

    def inverse_jacobian(self, zeta):
        u = np.asarray(zeta, dtype=complex) - unit(0, self.rigid.unitary.shape[0])
        n = u.shape[-1]
        up = u[..., 1:]
        d = np.zeros(u.shape[:-1] + (n, n), dtype=complex)
        d[..., 0, 0] = 1.0
        d[..., 0, 1:] = -(up @ self.shear)
        d[..., 1:, 1:] = self.scale
        return self.rigid.unitary.conj().T @ d


def osculating_map(domain: DomainSpec, p) -> OsculatingMap:
    """Second-order normalization of the domain at the boundary point p."""
    rigid = normalize_boundary(domain, p)
    p = as_point(p, domain.dimension)
    g = domain.gradient(p)
    scale = 2.0 / float(norm(g))
    u = rigid.unitary
    hc = scale * (u @ domain.complex_hessian(p) @ u.conj().T)
    r = realify(u.conj().T)
    hr = scale * (r.T @ domain.real_hessian(p) @ r)
    levi = hc[1:, 1:]
    levi = 0.5 * (levi + levi.conj().T)
    vals, vecs = np.linalg.eigh(levi)
    if domain.dimension > 1 and vals[0] <= 0:
        raise GeometryError("Levi form is not positive at the normalization point")
    m = (vecs / np.sqrt(vals)) @ vecs.conj().T if domain.dimension > 1 else np.zeros((0, 0))
    s = holomorphic_hessian(hr)[1:, 1:]
    q = m.T @ s @ m
    return OsculatingMap(rigid, m, 0.5 * (q + q.T))


def normalized_domain(domain: DomainSpec, p, order: int = 2) -> MappedDomain:
    """The domain moved so that p sits at e_1 with outer normal e_1.

    ``order=1`` applies the rigid map only; ``order=2`` also matches the unit
    sphere to second weighted order at e_1.
    """
    if order == 1:
        mapping = normalize_boundary(domain, p)
    elif order == 2:
        mapping = osculating_map(domain, p)
    else:
        raise ConfigurationError("order must be 1 or 2")
    return MappedDomain(domain.dimension, base=domain, mapping=mapping)


# ---------------------------------------------------------------------------
# normal rays and curve lengths


def normal_ray_curve(domain: DomainSpec, z, T: float, samples: int = 101) -> SampledCurve:
    """sigma(t) = z + t * (inner unit normal at the projection of z), t in [0, T]."""
    z = as_point(z, domain.dimension)
    frame = boundary_frame(domain, z)
    if frame.signed_delta >= 0:
        raise GeometryError("normal rays start at interior points")
    if T < 0:
        raise ConfigurationError("T must be nonnegative")
    if T == 0:
        return SampledCurve(np.zeros(1), z[None, :])
    d = frame.inner_normal
    t_max = raycast(domain, z, d)
    r = domain.working_radius
    if r is not None:
        b = float(np.real(inner(z, d)))
        t_ball = -b + math.sqrt(b * b + r * r - float(norm(z)) ** 2)
        t_max = t_ball if t_max is None else min(t_max, t_ball)
    if t_max is not None and T >= t_max:
        raise RangeError(f"ray leaves the domain at t = {t_max:.6g}", max_parameter=t_max)
    times = np.linspace(0.0, T, max(samples, 2))
    return SampledCurve(times, z[None, :] + times[:, None] * d[None, :])


def normal_ray_pair_curve(domain: DomainSpec, z, w, alpha: float | None = None,
                          fraction: float = 0.1, samples: int = 101) -> SampledCurve:
    """Union of the inner normal rays from z and (reversed) from w.

    Both rays have length t_n = fraction * alpha * |z - w|, with alpha the
    normal share |(z-w)_z| / |z-w| by default.  The junction is a jump.
    """
    z = as_point(z, domain.dimension)
    w = as_point(w, domain.dimension)
    d = float(norm(z - w))
    if alpha is None:
        f = boundary_frame(domain, z)
        alpha = abs(complex(inner(z - w, f.outer_normal))) / d
    tn = fraction * alpha * d
    a = normal_ray_curve(domain, z, tn, samples)
    b = normal_ray_curve(domain, w, tn, samples)
    if len(a) == 1:
        return SampledCurve(np.array([0.0, 1.0]), np.vstack([z, w]), breaks=(0,))
    times = np.concatenate([a.times, 2 * tn - b.times[::-1] + tn / (samples - 1)])
    pts = np.vstack([a.points, b.points[::-1]])
    return SampledCurve(times, pts, breaks=(len(a) - 1,))


def _curve_delta_floor(domain, curve):
    pts = curve.points
    if isinstance(domain, UnitBall):
        delta = 1.0 - norm(pts)
    else:
        delta = np.where(domain.rho(pts) < 0, np.inf, -1.0)
    if np.any(delta < DELTA_FLOOR):
        raise NumericError("curve reaches the boundary-distance floor",
                           residual=float(np.min(delta)))


def curve_kobayashi_length(domain: DomainSpec, curve: SampledCurve,
                           backend: str = "interval", rtol: float = 1e-4) -> float:
    """Integrated metric along the polyline through the curve samples."""
    if len(curve) < 2:
        return 0.0
    _curve_delta_floor(domain, curve)
    return curve_length(metric_function(domain, backend), curve, rtol)


def curve_kobayashi_length_upper(domain: DomainSpec, curve: SampledCurve,
                                 rtol: float = 1e-4) -> float:
    """Upper bound for the Kobayashi length using the inscribed-disc metric bound."""
    return curve_kobayashi_length(domain, curve, "interval", rtol)


# ---------------------------------------------------------------------------
# scaling convergence


def _sphere_directions(n, count, seed):
    rng = np.random.default_rng(seed)
    x = rng.normal(size=(count, 2 * n))
    s = x[:, :n] + 1j * x[:, n:]
    return s / norm(s)[:, None]


def scaling_hausdorff_defect(domain: DomainSpec, t: float, boundary_samples: int = 256,
                             seed: int = 0) -> float:
    """max | |b| - 1 | over boundary points b of A_{-t}(domain) with Re b_1 > -1/2.

    Boundary points are located along rays from the origin of the rescaled
    picture (or from the image of the domain center when A_t(0) is not inside).
    """
    _check_t(t)
    n = domain.dimension

    def rho_img(x):
        y, den = _automorphism_raw(t, x)
        val = domain.rho(y)
        r = domain.working_radius
        if r is not None:
            val = np.where(norm(y) >= r, np.maximum(val, 1.0), val)
        return np.where((np.abs(den) > SINGULAR_TOL) & np.isfinite(val), val, 1.0)

    origin = np.zeros(n, dtype=complex)
    if not rho_img(origin[None, :])[0] < 0:
        origin, den = _automorphism_raw(-t, domain.center)
        if abs(den) < SINGULAR_TOL or not rho_img(origin[None, :])[0] < 0:
            raise GeometryError("no interior reference point for the rescaled domain")
    dirs = _sphere_directions(n, boundary_samples, seed)
    rs = np.linspace(0.0, 3.0, 301)[1:]
    pts = origin[None, None, :] + rs[None, :, None] * dirs[:, None, :]
    out = rho_img(pts) >= 0
    has = out.any(axis=1)
    k = out.argmax(axis=1)
    lo = np.where(k > 0, rs[np.maximum(k - 1, 0)], 0.0)
    hi = rs[k]
    dirs, lo, hi = dirs[has], lo[has], hi[has]
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        ins = rho_img(origin + mid[:, None] * dirs) < 0
        lo = np.where(ins, mid, lo)
        hi = np.where(ins, hi, mid)
    b = origin + 0.5 * (lo + hi)[:, None] * dirs
    keep = b[:, 0].real > -0.5
    if not np.any(keep):
        return 0.0
    return float(np.max(np.abs(norm(b[keep]) - 1.0)))


__all__ = [
    "mobius", "ball_automorphism", "RigidMap", "normalize_boundary",
    "OsculatingMap", "osculating_map", "normalized_domain", "normal_ray_curve",
    "normal_ray_pair_curve", "curve_kobayashi_length", "curve_kobayashi_length_upper",
    "scaling_hausdorff_defect", "holomorphic_hessian", "SampledCurve",
]
