"""Boundary-distance estimators: A, the Box-Ball proxy, g, h and SLC ratio scans."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .bounds import EstimatorConstants
from .domains import DomainSpec, LocalModelS9, as_point, inner, norm, unit
from .errors import GeometryError, SamplingError
from .geometry import (DELTA_FLOOR, boundary_frame, frame_arrays,
                       normal_components, require_delta, tangent_basis)


@dataclass(frozen=True)
class PairQuantities:
    norm_diff: float
    normal_mag: float
    real_normal_mag: float
    delta_z: float
    delta_w: float
    A: float
    g: float
    h: float
    h_real: float

    def to_record(self) -> dict:
        return dict(self.__dict__)


def _a_formula(nd, nm, dz, dw):
    return (nm + nd ** 2 + nd * np.sqrt(dz)) / (np.sqrt(dz) * np.sqrt(dw))


def a_quantity(domain: DomainSpec, z, w) -> float:
    """(|(z-w)_z| + |z-w|^2 + |z-w| delta(z)^{1/2}) / (delta(z) delta(w))^{1/2}."""
    z = as_point(z, domain.dimension)
    w = as_point(w, domain.dimension)
    fz = boundary_frame(domain, z)
    fw = boundary_frame(domain, w)
    require_delta(fz.delta)
    require_delta(fw.delta)
    nm, _, _ = normal_components(fz, z - w)
    return float(_a_formula(float(norm(z - w)), nm, fz.delta, fw.delta))


def sandwich(A: float, constants: EstimatorConstants):
    """(log(1 + c A), log(1 + C A))."""
    if A < 0:
        raise ValueError("A must be nonnegative")
    return math.log1p(constants.c * A), math.log1p(constants.C * A)


def cc_proxy(domain: DomainSpec, p, q, tol: float = 1e-8) -> float:
    """sqrt(|(p-q)_p| + |p-q|^2) for boundary points p, q."""
    p = as_point(p, domain.dimension)
    q = as_point(q, domain.dimension)
    for x in (p, q):
        if abs(float(domain.rho(x))) > tol:
            raise GeometryError("Box-Ball proxy needs boundary points")
    g = domain.gradient(p)
    if norm(g) == 0:
        raise GeometryError("degenerate gradient")
    eta = g / norm(g)
    d = p - q
    return math.sqrt(abs(complex(inner(d, eta))) + float(norm(d)) ** 2)


def g_balogh_bonk(domain: DomainSpec, z, w) -> float:
    """log((proxy(pi(z), pi(w))^2 + max delta) / (delta(z) delta(w))^{1/2})."""
    fz = boundary_frame(domain, z)
    fw = boundary_frame(domain, w)
    require_delta(fz.delta)
    require_delta(fw.delta)
    if not (fz.unique_projection and fw.unique_projection):
        raise GeometryError("Balogh-Bonk quantity needs unique projections")
    proxy = cc_proxy(domain, fz.projection, fw.projection)
    return math.log((proxy ** 2 + max(fz.delta, fw.delta)) / math.sqrt(fz.delta * fw.delta))


def h_quantities(domain: DomainSpec, z, w):
    """(|(z-w)_z| + |z-w| delta(z)^{1/2}, |Re<z-w, eta>| + |z-w| delta(z)^{1/2})."""
    z = as_point(z, domain.dimension)
    w = as_point(w, domain.dimension)
    fz = boundary_frame(domain, z)
    nm, nr, _ = normal_components(fz, z - w)
    tail = float(norm(z - w)) * math.sqrt(fz.delta)
    return nm + tail, nr + tail


def pair_quantities(domain: DomainSpec, z, w) -> PairQuantities:
    z = as_point(z, domain.dimension)
    w = as_point(w, domain.dimension)
    fz = boundary_frame(domain, z)
    fw = boundary_frame(domain, w)
    require_delta(fz.delta)
    require_delta(fw.delta)
    nm, nr, _ = normal_components(fz, z - w)
    nd = float(norm(z - w))
    tail = nd * math.sqrt(fz.delta)
    g = g_balogh_bonk(domain, z, w) if fz.unique_projection and fw.unique_projection else float("nan")
    return PairQuantities(nd, nm, nr, fz.delta, fw.delta,
                          float(_a_formula(nd, nm, fz.delta, fw.delta)), g, nm + tail, nr + tail)


# ---------------------------------------------------------------------------
# batched forms (closed-form frames on the ball)


def batch_quantities(domain: DomainSpec, z: np.ndarray, w: np.ndarray) -> dict:
    """Vectorized pair quantities for stacks of points of shape (M, N)."""
    z = np.asarray(z, dtype=complex)
    w = np.asarray(w, dtype=complex)
    dz, pz, ez = frame_arrays(domain, z)
    dw, pw, ew = frame_arrays(domain, w)
    if np.any(dz < DELTA_FLOOR) or np.any(dw < DELTA_FLOOR):
        from .errors import NumericError
        raise NumericError("boundary distance below floor in batch", residual=float(min(dz.min(), dw.min())))
    diff = z - w
    nd = norm(diff)
    pairing = inner(diff, ez)
    nm = np.abs(pairing)
    nr = np.abs(pairing.real)
    A = _a_formula(nd, nm, dz, dw)
    pd = pz - pw
    proxy2 = np.abs(inner(pd, ez)) + norm(pd) ** 2
    g = np.log((proxy2 + np.maximum(dz, dw)) / np.sqrt(dz * dw))
    tail = nd * np.sqrt(dz)
    return {"norm_diff": nd, "normal_mag": nm, "real_normal_mag": nr,
            "delta_z": dz, "delta_w": dw, "A": A, "g": g,
            "h": nm + tail, "h_real": nr + tail}


# ---------------------------------------------------------------------------
# the non-convex local model


def s9_sequence(eps, delta_exponent: float = 3.0, offset_exponent: float = 4.0,
                domain: LocalModelS9 | None = None):
    """Pairs z_n = (-eps^a, 0), w_n = (0, eps) pushed inward by eps^b.

    The literal points sit on the closure; each is moved along the inner
    normal at its projection by eps^offset_exponent to make it interior.
    """
    domain = domain or LocalModelS9()
    out = []
    for e in np.atleast_1d(eps):
        e = float(e)
        push = e ** offset_exponent
        pts = []
        for lit in (np.array([-e ** delta_exponent, 0.0], dtype=complex),
                    np.array([0.0, e], dtype=complex)):
            f = boundary_frame(domain, lit)
            pts.append(lit + push * f.inner_normal)
        out.append(tuple(pts))
    return out


def s9_ratios(eps, delta_exponent: float = 3.0, offset_exponent: float = 4.0):
    """h / |z-w|^2 along the local-model sequence, one value per eps."""
    dom = LocalModelS9()
    rows = []
    for e, (z, w) in zip(np.atleast_1d(eps), s9_sequence(eps, delta_exponent, offset_exponent, dom)):
        h, h_real = h_quantities(dom, z, w)
        nd2 = float(norm(z - w)) ** 2
        rows.append({"eps": float(e), "h": h, "h_real": h_real, "norm_diff_sq": nd2,
                     "ratio": h / nd2, "ratio_real": h_real / nd2,
                     "z": z, "w": w})
    return rows


# ---------------------------------------------------------------------------
# strict linear convexity scans


def _surface_hit(domain, x, eta, span):
    """Boundary point x + t eta with |t| <= span closest to t = 0."""
    ts = np.linspace(-span, span, 81)
    vals = domain.rho(x[None, :] + ts[:, None] * eta[None, :])
    sign = np.sign(vals)
    idx = np.nonzero(sign[:-1] * sign[1:] <= 0)[0]
    if idx.size == 0:
        return None
    j = idx[np.argmin(np.abs(ts[idx]))]
    lo, hi = ts[j], ts[j + 1]
    flo = vals[j]
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        fm = float(domain.rho(x + mid * eta))
        if np.sign(fm) == np.sign(flo) and fm != 0:
            lo, flo = mid, fm
        else:
            hi = mid
    return x + 0.5 * (lo + hi) * eta


def _boundary_shell_samples(domain, p, eta, r, count, rng):
    """Boundary points q with |q - p| in (r/2, r], weighted toward tangential ones."""
    n = domain.dimension
    tb = tangent_basis(eta)
    dirs = []
    # pure complex-tangent directions
    for k in range(tb.shape[1]):
        for ph in np.linspace(0, 2 * np.pi, 8, endpoint=False):
            dirs.append(np.exp(1j * ph) * tb[:, k])
    # tangent plus a small imaginary-normal share
    for phi in np.geomspace(1e-4, 1.0, 12):
        for k in range(tb.shape[1]):
            dirs.append(math.cos(phi) * tb[:, k] + math.sin(phi) * 1j * eta)
    while len(dirs) < count:
        v = rng.normal(size=n) + 1j * rng.normal(size=n)
        v = v - np.real(inner(v, eta)) * eta
        dirs.append(v / norm(v))
    out = []
    for v in dirs:
        for s in (0.55 * r, 0.8 * r, r):
            q = _surface_hit(domain, p + s * v, eta, r)
            if q is None:
                continue
            d = float(norm(q - p))
            if 0.5 * r < d <= r:
                out.append(q)
    return out


def _ratio(p, x, eta):
    d = p - x
    return abs(complex(inner(d, eta))) / float(norm(d)) ** 2


def slc_ratio_scan(domain: DomainSpec, p, radii, samples: int = 64, seed: int = 0,
                   depths: int = 12) -> list:
    """Per-radius infima of the strict-linear-convexity ratios.

    For each radius r the shell (r/2, r] around p is sampled:

    * c4: |(p-q)_p| / |p-q|^2 over boundary points q;
    * c3: the same ratio over interior points w = q - t eta_q;
    * c2: h(z, w) / |z-w|^2 with z = p - s eta_p on the inner normal
      segment (s = 0 included) and w as for c3.
    """
    p = as_point(p, domain.dimension)
    if abs(float(domain.rho(p))) > 1e-8:
        raise GeometryError("scan center must be a boundary point")
    g = domain.gradient(p)
    eta = g / norm(g)
    radii = np.asarray(radii, dtype=float)
    rng = np.random.default_rng(seed)
    rows = []
    for r in radii:
        qs = _boundary_shell_samples(domain, p, eta, r, samples, rng)
        if len(qs) < 4:
            raise SamplingError(f"only {len(qs)} boundary samples in the shell of radius {r}")
        c4 = min(_ratio(p, q, eta) for q in qs)
        ws = []
        for q in qs:
            gq = domain.gradient(q)
            eq = gq / norm(gq)
            for t in np.geomspace(1e-9 * r, 0.25 * r, depths):
                w = q - t * eq
                d = float(norm(w - p))
                if 0.5 * r < d <= r and domain.rho(w) < 0:
                    ws.append(w)
        if len(ws) < 4:
            raise SamplingError(f"only {len(ws)} interior samples in the shell of radius {r}")
        c3 = min(_ratio(p, w, eta) for w in ws)
        c2 = c3  # z = p term
        for s in np.geomspace(1e-6 * r, r, 8):
            z = p - s * eta
            if domain.rho(z) >= 0:
                continue
            dz = boundary_frame(domain, z)
            for w in ws[:: max(1, len(ws) // 64)]:
                diff = z - w
                nd = float(norm(diff))
                h = abs(complex(inner(diff, dz.outer_normal))) + nd * math.sqrt(dz.delta)
                c2 = min(c2, h / nd ** 2)
        rows.append({"radius": float(r), "c2_est": c2, "c3_est": c3, "c4_est": c4,
                     "boundary_samples": len(qs), "interior_samples": len(ws)})
    return rows


__all__ = [
    "PairQuantities", "a_quantity", "sandwich", "cc_proxy", "g_balogh_bonk",
    "h_quantities", "pair_quantities", "batch_quantities", "s9_sequence",
    "s9_ratios", "slc_ratio_scan",
]
