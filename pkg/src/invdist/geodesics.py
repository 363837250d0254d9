"""Geodesic-level diagnostics on analytic discs and sampled curves."""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .ball import DiscMap, disc_automorphism
from .curves import SampledCurve
from .domains import DomainSpec, as_point, inner, norm
from .errors import DegeneracyError, DomainError
from .geometry import boundary_frame, frame_arrays, normal_components

GRID_ANGLES = 256
GRID_RADII = 64


class ResolutionWarning(UserWarning):
    """Grid estimate changed noticeably under refinement."""


@dataclass(frozen=True)
class DiscInvariants:
    diameter: float
    max_delta: float
    max_derivative: float
    tangency_defect: float

    def to_record(self) -> dict:
        return dict(self.__dict__)


def _polar_grid(angles: int, radii: int, r_max: float):
    r = np.linspace(0.0, r_max, radii + 1)[1:]
    th = np.linspace(0.0, 2 * np.pi, angles, endpoint=False)
    zeta = (r[:, None] * np.exp(1j * th)[None, :]).ravel()
    return np.concatenate([[0.0 + 0.0j], zeta])


def _delta_on(domain, disc, zeta):
    delta, _, _ = frame_arrays(domain, disc(zeta))
    return delta


def _delta_and_grad(domain, disc, zeta):
    """delta(phi(zeta)) and its real gradient in (Re zeta, Im zeta)."""
    f = boundary_frame(domain, disc(zeta))
    q = complex(inner(disc.derivative(zeta), f.outer_normal))
    return f.delta, np.array([-q.real, q.imag]), q


def _defect_at(domain, disc, zeta):
    f = boundary_frame(domain, disc(zeta))
    if not f.unique_projection:
        return float("nan")
    d = disc.derivative(zeta)
    return abs(complex(inner(d, f.outer_normal))) / float(norm(d))


def reparametrize_max_delta(domain: DomainSpec, disc: DiscMap, angles: int = GRID_ANGLES,
                            radii: int = GRID_RADII, tol: float = 1e-12,
                            edge: float = 1e-9) -> DiscMap:
    """Precompose with a disc automorphism so that phi(0) maximizes delta.

    A polar grid locates the best cell; a damped Newton iteration on the
    stationarity condition <phi'(zeta), eta> = 0 then polishes it.
    """
    r_max = 1.0 - 0.5 / radii
    zeta = _polar_grid(angles, radii, r_max)
    vals = _delta_on(domain, disc, zeta)
    x = np.array([zeta[np.argmax(vals)].real, zeta[np.argmax(vals)].imag])
    h = 1e-6
    for _ in range(60):
        z0 = complex(x[0], x[1])
        val, grad, _ = _delta_and_grad(domain, disc, z0)
        if not _defect_at(domain, disc, z0) > tol:
            break
        jac = np.empty((2, 2))
        for k in range(2):
            e = np.zeros(2)
            e[k] = h
            gp = _delta_and_grad(domain, disc, complex(*(x + e)))[1]
            gm = _delta_and_grad(domain, disc, complex(*(x - e)))[1]
            jac[:, k] = (gp - gm) / (2 * h)
        try:
            step = -np.linalg.solve(jac, grad)
        except np.linalg.LinAlgError:
            step = 1e-2 * grad
        if grad @ step <= 0:
            step = 1e-2 * grad
        t = 1.0
        while t > 1e-12:
            cand = x + t * step
            if abs(complex(*cand)) < 1.0 - edge:
                cv = float(boundary_frame(domain, disc(complex(*cand))).delta)
                if cv >= val - 1e-15:
                    break
            t *= 0.5
        x = x + t * step
    best = complex(x[0], x[1])
    if abs(best) >= 1.0 - max(edge, 0.25 / radii):
        raise DegeneracyError("maximum of delta along the disc lies on the boundary circle")
    return disc.precompose(disc_automorphism(best))


def _ring_diameter(pts):
    diff = pts[:, None, :] - pts[None, :, :]
    return float(np.sqrt(np.max(np.sum(np.abs(diff) ** 2, axis=-1))))


def disc_invariants(domain: DomainSpec, disc: DiscMap, grid: int = GRID_ANGLES,
                    radii: int = GRID_RADII, rtol: float = 1e-3) -> DiscInvariants:
    """Diameter, max delta, max |phi'| and tangency defect on a polar grid."""
    if grid < 4:
        raise ValueError("grid needs at least four angles")
    ring = np.exp(2j * np.pi * np.arange(grid) / grid)
    diameter = _ring_diameter(disc(ring))
    coarse = _ring_diameter(disc(ring[::2]))
    if abs(diameter - coarse) > rtol * max(diameter, 1e-300):
        warnings.warn(f"diameter changed by {abs(diameter - coarse):.3g} under grid refinement",
                      ResolutionWarning, stacklevel=2)
    inner_grid = _polar_grid(grid, radii, 1.0 - 0.5 / radii)
    max_delta = float(np.max(_delta_on(domain, disc, inner_grid)))
    full = np.concatenate([inner_grid, ring])
    max_derivative = float(np.max(norm(disc.derivative(full))))
    return DiscInvariants(diameter, max_delta, max_derivative, _defect_at(domain, disc, 0.0))


def _on_disc(disc: DiscMap, z, tol=1e-9):
    zeta = complex(disc.preimage(z))
    if abs(zeta) >= 1.0 or float(norm(disc(zeta) - z)) > tol * max(1.0, float(norm(z))):
        raise DomainError("point does not lie on the disc image")
    return zeta


def theorem5_balance(domain: DomainSpec, disc: DiscMap, z, w, diameter: float | None = None) -> float:
    """(|(z-w)_z| / |z-w| + delta(z)^{1/2} + |z-w|) / d_e(phi)."""
    z = as_point(z, domain.dimension)
    w = as_point(w, domain.dimension)
    nd = float(norm(z - w))
    if nd == 0:
        raise DegeneracyError("balance quantity needs distinct points")
    _on_disc(disc, z)
    _on_disc(disc, w)
    f = boundary_frame(domain, z)
    nm, _, _ = normal_components(f, z - w)
    if diameter is None:
        diameter = disc_invariants(domain, disc).diameter
    return (nm / nd + math.sqrt(f.delta) + nd) / diameter


def length_ratios(domain: DomainSpec, curve: SampledCurve) -> dict:
    """Euclidean length over endpoint gap and over the root of max delta."""
    gap = float(norm(curve.points[-1] - curve.points[0]))
    if gap == 0:
        raise DegeneracyError("curve endpoints coincide")
    length = curve.euclidean_length()
    delta, _, _ = frame_arrays(domain, curve.points)
    big_d = float(np.max(delta))
    return {"length": length, "gap": gap, "max_delta": big_d,
            "gehring": length / gap, "prop3": length / math.sqrt(big_d)}


def boundary_normal_share(domain: DomainSpec, disc: DiscMap, angles: int = 64,
                          inset: float = 1e-6) -> np.ndarray:
    """|(phi'(zeta))_{phi(zeta)}| / |phi'(zeta)| just inside the boundary circle."""
    zeta = (1.0 - inset) * np.exp(2j * np.pi * np.arange(angles) / angles)
    pts = disc(zeta)
    der = disc.derivative(zeta)
    _, _, eta = frame_arrays(domain, pts)
    return np.abs(inner(der, eta)) / norm(der)


__all__ = [
    "DiscInvariants", "ResolutionWarning", "reparametrize_max_delta", "disc_invariants",
    "theorem5_balance", "length_ratios", "boundary_normal_share",
]
