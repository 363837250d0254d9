"""Boundary geometry: closest points, frames, normal components, Levi data."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .domains import (DomainSpec, Ellipsoid, UnitBall, as_point, inner, norm,
                      to_complex, to_real, unit)
from .errors import DomainError, GeometryError, NumericError

DELTA_FLOOR = 1e-12
NEWTON_TOL = 1e-10


@dataclass(frozen=True)
class BoundaryFrame:
    """Boundary data attached to a point ``z``.

    ``outer_normal`` is the outer unit normal at ``projection``; ``signed_delta``
    is negative inside the domain.
    """

    point: np.ndarray
    delta: float
    projection: np.ndarray
    outer_normal: np.ndarray
    levi_min: float
    unique_projection: bool
    signed_delta: float

    @property
    def inner_normal(self) -> np.ndarray:
        return -self.outer_normal

    def to_record(self) -> dict:
        return {
            "point": _pairs(self.point),
            "delta": self.delta,
            "signed_delta": self.signed_delta,
            "projection": _pairs(self.projection),
            "outer_normal": _pairs(self.outer_normal),
            "levi_min": self.levi_min,
            "unique_projection": self.unique_projection,
        }


def _pairs(v):
    return [[float(c.real), float(c.imag)] for c in np.asarray(v)]


# ---------------------------------------------------------------------------
# closest point


def _real_grad(domain, x):
    return to_real(domain.gradient(to_complex(x)))


def _newton_projection(domain: DomainSpec, q: np.ndarray, x0: np.ndarray,
                       tol: float = NEWTON_TOL, maxiter: int = 60):
    """Damped Newton on the stationarity system of min |x - q|^2, rho(x) = 0.

    Returns ``(x, residual)``; ``x`` is None when the iteration stalls.
    """
    xq = to_real(q)
    x = to_real(x0).astype(float)
    g = _real_grad(domain, x)
    gg = float(g @ g)
    if gg == 0.0:
        return None, np.inf
    mu = -float((x - xq) @ g) / gg
    n2 = x.size

    def residual(x, mu):
        xc = to_complex(x)
        g = to_real(domain.gradient(xc))
        return np.concatenate([x - xq + mu * g, [float(domain.rho(xc))]]), g

    F, g = residual(x, mu)
    fn = np.linalg.norm(F)
    for _ in range(maxiter):
        if fn < tol:
            return to_complex(x), fn
        H = domain.real_hessian(to_complex(x))
        J = np.zeros((n2 + 1, n2 + 1))
        J[:n2, :n2] = np.eye(n2) + mu * H
        J[:n2, n2] = g
        J[n2, :n2] = g
        try:
            step = np.linalg.solve(J, -F)
        except np.linalg.LinAlgError:
            step = np.linalg.lstsq(J, -F, rcond=None)[0]
        t = 1.0
        while t > 1e-6:
            xt, mut = x + t * step[:n2], mu + t * step[n2]
            Ft, gt = residual(xt, mut)
            ft = np.linalg.norm(Ft)
            if ft < (1 - 1e-4 * t) * fn:
                break
            t *= 0.5
        else:
            return None, fn
        x, mu, F, g, fn = xt, mut, Ft, gt, ft
    return (to_complex(x), fn) if fn < tol else (None, fn)


def raycast(domain: DomainSpec, origin, direction, t_max: float | None = None,
            samples: int = 64):
    """Smallest t > 0 where rho(origin + t*direction) changes sign, or None."""
    origin = np.asarray(origin, dtype=complex)
    d = np.asarray(direction, dtype=complex)
    nd = norm(d)
    if nd == 0:
        return None
    d = d / nd
    if t_max is None:
        try:
            t_max = 2.0 * (domain.enclosing_radius + norm(origin)) + 1.0
        except Exception:
            t_max = 4.0
    r0 = float(domain.rho(origin))
    if r0 == 0.0:
        return 0.0
    ts = t_max * np.geomspace(1e-9, 1.0, samples)
    vals = domain.rho(origin[None, :] + ts[:, None] * d[None, :])
    flips = np.nonzero(np.sign(vals) != np.sign(r0))[0]
    if flips.size == 0:
        return None
    k = flips[0]
    lo = 0.0 if k == 0 else ts[k - 1]
    f = lambda t: float(domain.rho(origin + t * d))
    return brentq(f, lo, ts[k], xtol=1e-15, maxiter=200)


def _seeds(domain: DomainSpec, q: np.ndarray):
    """Boundary points reached by deterministic ray casts from ``q`` (lazy)."""
    r0 = float(domain.rho(q))
    g = domain.gradient(q)
    if norm(g) > 0:
        d = g if r0 < 0 else -g
        t = raycast(domain, q, d)
        if t is not None:
            yield q + t * d / norm(d)
    c = domain.center
    if norm(q - c) > 1e-14:
        dirv = q - c
        t = raycast(domain, c, dirv)
        if t is not None:
            yield c + t * dirv / norm(dirv)
    for k in range(domain.dimension):
        for s in (1.0, -1.0, 1j, -1j):
            e = s * unit(k, domain.dimension)
            t = raycast(domain, q, e)
            if t is not None:
                yield q + t * e


def _tangent_descent(domain, q, x, iters=4000, tol=NEWTON_TOL):
    """Projected-gradient fallback: slide along the surface toward q."""
    for _ in range(iters):
        g = domain.gradient(x)
        eta = g / norm(g)
        diff = x - q
        tang = diff - np.real(inner(diff, eta)) * eta
        if norm(tang) < tol:
            return x, norm(tang)
        y = x - 0.5 * tang
        # pull back onto the surface along the local normal
        for _ in range(30):
            gy = domain.gradient(y)
            ry = float(domain.rho(y))
            y = y - ry * gy / float(np.real(inner(gy, gy)))
            if abs(ry) < 1e-15:
                break
        x = y
    return x, norm(tang)


def closest_points(domain: DomainSpec, z, exhaustive: bool = False):
    """All distinct stationary boundary points found from the seeds, sorted by distance."""
    q = as_point(z, domain.dimension)
    found = []
    residuals = []
    for seed in _seeds(domain, q):
        x, res = _newton_projection(domain, q, seed)
        residuals.append(res)
        if x is None:
            continue
        d = float(norm(x - q))
        if not any(norm(x - y) < 1e-7 for y, _ in found):
            found.append((x, d))
        if not exhaustive and d < domain.reach:
            break
    found.sort(key=lambda item: item[1])
    return found, residuals


def _ellipsoid_projection(domain, q):
    """Closest point on an ellipsoid through the one-dimensional secular equation.

    The minimizer is q_j / (1 + mu a_j) with mu the unique root of
    sum a_j |q_j|^2 / (1 + mu a_j)^2 = 1 on (-1/a_max, 0) inside, (0, inf)
    outside.  Returns None when q has no component on the longest-curvature
    axes, where the root may leave that interval.
    """
    a = domain.a
    w = a * np.abs(q) ** 2
    amax = a.max()
    if w[a == amax].sum() < 1e-16:
        return None
    f = lambda mu: float(np.sum(w / (1 + mu * a) ** 2) - 1.0)
    r0 = f(0.0)
    if r0 == 0.0:
        return q.copy(), 0.0, True
    if r0 < 0:
        lo, hi = -1.0 / amax, 0.0
        # walk toward the pole until the sign flips
        s = 0.5
        while f(lo * (1 - s)) <= 0:
            s *= 0.5
            if s < 1e-17:
                return None
        lo = lo * (1 - s)
    else:
        lo, hi = 0.0, 1.0
        while f(hi) > 0:
            hi *= 2
    mu = brentq(f, lo, hi, xtol=1e-16, maxiter=400)
    x = q / (1 + mu * a)
    # polish onto the surface along the radial direction
    x = x / np.sqrt(np.sum(a * np.abs(x) ** 2))
    x, res = _newton_projection(domain, q, x)
    if x is None:
        return None
    return x, float(norm(x - q)), True


def _project(domain: DomainSpec, q: np.ndarray):
    if isinstance(domain, UnitBall):
        r = float(norm(q))
        if r < 1e-15:
            return unit(0, domain.dimension), 1.0, False
        return q / r, abs(1.0 - r), True
    if isinstance(domain, Ellipsoid):
        hit = _ellipsoid_projection(domain, q)
        if hit is not None:
            return hit
    found, residuals = closest_points(domain, q)
    if not found:
        seeds = list(_seeds(domain, q))
        if not seeds:
            raise NumericError("no boundary point reachable from the seeds", residual=np.inf)
        best = min(seeds, key=lambda s: norm(s - q))
        x, res = _tangent_descent(domain, q, best)
        if res > 1e-8:
            raise NumericError("closest-point solver did not converge", residual=float(res))
        found = [(x, float(norm(x - q)))]
    x, d = found[0]
    unique = True
    if d >= domain.reach:
        # exhaustive pass certifies the minimum
        more, _ = closest_points(domain, q, exhaustive=True)
        found = sorted(found + more, key=lambda item: item[1])
        x, d = found[0]
        scale = max(1.0, d)
        unique = not any(abs(e - d) < 1e-8 * scale and norm(y - x) > 1e-6
                         for y, e in found[1:])
    return x, d, unique


def boundary_frame(domain: DomainSpec, z) -> BoundaryFrame:
    """Distance, closest point, outer normal and Levi minimum for ``z``."""
    q = as_point(z, domain.dimension)
    domain.check_region(q)
    p, d, unique = _project(domain, q)
    g = domain.gradient(p)
    ng = float(norm(g))
    if ng == 0.0:
        raise GeometryError("degenerate gradient at the projection")
    eta = g / ng
    sign = 1.0 if float(domain.rho(q)) > 0 else -1.0
    if isinstance(domain, UnitBall):
        levi = 0.5 if domain.dimension > 1 else np.inf
    else:
        levi = _levi_from(domain, p, g)
    return BoundaryFrame(point=q, delta=float(d), projection=p, outer_normal=eta,
                         levi_min=float(levi), unique_projection=bool(unique),
                         signed_delta=sign * float(d))


def signed_distance(domain: DomainSpec, z) -> float:
    """Signed boundary distance, negative inside."""
    return boundary_frame(domain, z).signed_delta


def require_delta(delta: float, floor: float = DELTA_FLOOR) -> float:
    if not delta >= floor:
        raise NumericError(f"boundary distance {delta:.3e} below floor {floor:.0e}",
                           residual=delta)
    return delta


# ---------------------------------------------------------------------------
# vector decomposition


def normal_components(frame: BoundaryFrame, v):
    """Return ``(|<v,eta>|, |Re<v,eta>|, v - <v,eta> eta)``."""
    v = np.asarray(v, dtype=complex)
    eta = frame.outer_normal
    c = inner(v, eta)
    return float(abs(c)), float(abs(c.real)), v - c * eta


def tangent_basis(eta: np.ndarray) -> np.ndarray:
    """Orthonormal basis (columns) of the complex orthogonal complement of eta."""
    n = eta.size
    m = np.column_stack([eta] + [unit(k, n) for k in range(n)])
    q, _ = np.linalg.qr(m)
    return q[:, 1:n]


def real_tangent_basis(eta: np.ndarray) -> np.ndarray:
    """Real basis (columns, length 2N) of the complex tangent space."""
    b = tangent_basis(eta)
    cols = [to_real(b[:, k]) for k in range(b.shape[1])]
    cols += [to_real(1j * b[:, k]) for k in range(b.shape[1])]
    return np.column_stack(cols) if cols else np.zeros((2 * eta.size, 0))


# ---------------------------------------------------------------------------
# second order data


def _on_boundary(domain, p, tol=1e-8):
    p = as_point(p, domain.dimension)
    val = float(domain.rho(p))
    if abs(val) > tol:
        raise GeometryError(f"point is not on the boundary (rho = {val:.3e})")
    g = domain.gradient(p)
    if norm(g) == 0:
        raise GeometryError("degenerate gradient")
    return p, g


def _levi_from(domain, p, g):
    if domain.dimension == 1:
        return np.inf
    ng = float(norm(g))
    b = tangent_basis(g / ng)
    h = domain.complex_hessian(p)
    form = b.conj().T @ h @ b / ng
    return float(np.linalg.eigvalsh(0.5 * (form + form.conj().T))[0])


def levi_minimum(domain: DomainSpec, p) -> float:
    """Minimum of the normalized Levi form over unit complex tangent vectors."""
    p, g = _on_boundary(domain, p)
    return _levi_from(domain, p, g)


def slc_lambda(domain: DomainSpec, p, method: str = "analytic", form: str = "real",
               step: float = 1e-4) -> float:
    """Minimal eigenvalue of the signed-distance Hessian on the complex tangent.

    ``form="real"`` uses half the real Hessian quadratic form, the normalization
    under which the boundary ratio infimum c3 equals this value.
    ``form="complex"`` returns the complex-Hessian form, i.e. the Levi minimum.
    ``method="fd"`` replaces the analytic Hessian by second differences of the
    signed distance.
    """
    p, g = _on_boundary(domain, p)
    if domain.dimension == 1:
        return np.inf
    if form == "complex":
        return _levi_from(domain, p, g)
    if form != "real":
        raise ValueError(f"unknown form {form!r}")
    ng = float(norm(g))
    r = real_tangent_basis(g / ng)
    if method == "analytic":
        hess = r.T @ domain.real_hessian(p) @ r / ng
    elif method == "fd":
        hess = _fd_signed_hessian(domain, p, r, step)
    else:
        raise ValueError(f"unknown method {method!r}")
    return float(0.5 * np.linalg.eigvalsh(0.5 * (hess + hess.T))[0])


def _fd_signed_hessian(domain, p, r, h):
    x = to_real(p)
    sd = lambda y: signed_distance(domain, to_complex(y))
    m = r.shape[1]
    out = np.zeros((m, m))
    f0 = sd(x)
    for i in range(m):
        ei = h * r[:, i]
        fp, fm = sd(x + ei), sd(x - ei)
        out[i, i] = (fp - 2 * f0 + fm) / h ** 2
        for j in range(i):
            ej = h * r[:, j]
            val = (sd(x + ei + ej) - sd(x + ei - ej) - sd(x - ei + ej) + sd(x - ei - ej)) / (4 * h ** 2)
            out[i, j] = out[j, i] = val
    if not np.all(np.isfinite(out)):
        raise NumericError("finite-difference stencil failed", residual=np.inf)
    return out


# ---------------------------------------------------------------------------
# batched ball frames (hot path for calibration)


def ball_frames(z: np.ndarray, radius: float = 1.0):
    """Vectorized closed-form frames for a ball of the given radius about 0.

    Returns ``(delta, projection, outer_normal)`` for points of shape (M, N).
    """
    z = np.asarray(z, dtype=complex)
    r = norm(z)
    if np.any(r >= radius):
        raise DomainError("points must lie inside the ball")
    safe = np.where(r > 1e-15, r, 1.0)
    eta = np.where((r > 1e-15)[..., None], z / safe[..., None], 0)
    eta[r <= 1e-15] = unit(0, z.shape[-1])
    return radius - r, radius * eta, eta


def frame_arrays(domain: DomainSpec, z: np.ndarray):
    """``(delta, projection, outer_normal)`` for a stack of points."""
    z = np.asarray(z, dtype=complex)
    if isinstance(domain, UnitBall):
        return ball_frames(z)
    frames = [boundary_frame(domain, zi) for zi in z.reshape(-1, domain.dimension)]
    shape = z.shape[:-1]
    delta = np.array([f.delta for f in frames]).reshape(shape)
    proj = np.array([f.projection for f in frames]).reshape(z.shape)
    eta = np.array([f.outer_normal for f in frames]).reshape(z.shape)
    return delta, proj, eta


__all__ = [
    "BoundaryFrame", "boundary_frame", "signed_distance", "normal_components",
    "levi_minimum", "slc_lambda", "tangent_basis", "real_tangent_basis",
    "closest_points", "raycast", "require_delta", "ball_frames", "frame_arrays",
    "DELTA_FLOOR",
]
