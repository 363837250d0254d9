"""Certified brackets for the Kobayashi-Royden metric and Kobayashi distance.

Upper bounds come from affine discs inside the domain (the metric is at most
|v| / R when z + R*zeta*v/|v| stays inside for |zeta| < 1) integrated along
optimized polylines.  Lower bounds come from a ball that contains the domain,
by monotonicity of the invariant distances.  The boundary-distance estimator formulas
are provided alongside and are labeled non-certified.
"""
from __future__ import annotations

import math
import threading
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize

from .ball import (has_exact_backend, kobayashi_exact, kobayashi_in_ball,
                   royden_ball, royden_exact, royden_in_ball)
from .curves import SampledCurve, curve_length
from .domains import (DomainSpec, Ellipsoid, LocalModelS9, UnitBall, as_point,
                      inner, norm, to_complex, to_real)
from .errors import CapabilityError, ConfigurationError, NumericError
from .geometry import boundary_frame, normal_components, require_delta

DEFAULT_C = 0.01
BACKENDS = ("exact-ball", "interval")

# ---------------------------------------------------------------------------
# interval values


class _Audit:
    def __init__(self):
        self._lock = threading.Lock()
        self.produced = 0
        self.violations = 0

    def record(self, ok: bool):
        with self._lock:
            self.produced += 1
            self.violations += 0 if ok else 1

    def snapshot(self):
        with self._lock:
            return {"produced": self.produced, "violations": self.violations}

    def reset(self):
        with self._lock:
            self.produced = 0
            self.violations = 0


BRACKET_AUDIT = _Audit()


@dataclass(frozen=True)
class IntervalValue:
    """A lower/upper pair bracketing a metric or distance value.

    Construction never fails on an inverted pair; it is recorded in
    ``BRACKET_AUDIT`` and flagged by ``consistent`` so scans can count it.
    """

    lower: float
    upper: float

    def __post_init__(self):
        lo, up = float(self.lower), float(self.upper)
        object.__setattr__(self, "lower", lo)
        object.__setattr__(self, "upper", up)
        BRACKET_AUDIT.record(self.consistent)

    @property
    def consistent(self) -> bool:
        lo, up = self.lower, self.upper
        return (math.isfinite(lo) and math.isfinite(up) and lo >= 0
                and lo <= up + 1e-12 * max(1.0, abs(up)))

    def contains(self, x: float, tol: float = 0.0) -> bool:
        return self.lower - tol <= x <= self.upper + tol

    @property
    def width(self) -> float:
        return self.upper - self.lower


@dataclass(frozen=True)
class EstimatorConstants:
    c: float
    C: float

    def __post_init__(self):
        if not 0 < self.c < self.C:
            raise ConfigurationError("estimator constants need 0 < c < C")


# ---------------------------------------------------------------------------
# enclosing ball


def enclosing_ball(domain: DomainSpec):
    """(radius, center) of a ball certified to contain the domain."""
    if isinstance(domain, Ellipsoid) and min(domain.coefficients) >= 1:
        return 1.0, domain.enclosing_center
    return domain.enclosing_radius, domain.enclosing_center


# ---------------------------------------------------------------------------
# inscribed affine discs


def _disc_radius_ball(z, u, radius=1.0):
    """Largest R with z + R zeta u inside the ball |x| < radius (u unit)."""
    b = np.abs(inner(z, u))
    s0 = np.maximum((radius - norm(z)) * (radius + norm(z)), 0.0)
    return np.where(s0 > 0, s0 / np.maximum(b + np.sqrt(b * b + s0), 1e-300), 0.0)


def _disc_radius_ellipsoid(a, z, u):
    b = np.abs(np.sum(a * u * np.conj(z), axis=-1))
    c = np.sum(a * np.abs(u) ** 2, axis=-1)
    s0 = np.maximum(1.0 - np.sum(a * np.abs(z) ** 2, axis=-1), 0.0)
    return np.where(s0 > 0, s0 / np.maximum(b + np.sqrt(b * b + c * s0), 1e-300), 0.0)


def _inside(domain, pts):
    ok = domain.rho(pts) < 0
    r = domain.working_radius
    if r is not None:
        ok &= norm(pts) < r
    return ok


def _first_exit(domain, z, u, theta, rmax, bisections=52):
    """First exit radius along rays z + r e^{i theta} u (vectorized over rows)."""
    rs = rmax * np.geomspace(1e-14, 1.0, 72)
    dirs = np.exp(1j * theta)[..., None] * u
    pts = z[:, None, :] + rs[None, :, None] * dirs[:, None, :]
    inside = _inside(domain, pts)
    out = ~inside
    has = out.any(axis=1)
    k = np.where(has, out.argmax(axis=1), rs.size - 1)
    lo = np.where(k > 0, rs[np.maximum(k - 1, 0)], 0.0)
    hi = rs[k]
    lo = np.where(has, lo, rmax)
    for _ in range(bisections):
        mid = 0.5 * (lo + hi)
        ins = _inside(domain, z + mid[:, None] * dirs)
        lo = np.where(has & ins, mid, lo)
        hi = np.where(has & ~ins, mid, hi)
    return lo


def _disc_radius_generic(domain, z, u, n_theta=24, refine=True, chunk=512):
    try:
        rmax = 2.0 * domain.enclosing_radius
    except ConfigurationError:
        rmax = 2.0
    out = np.empty(z.shape[0])
    thetas = np.linspace(0.0, 2 * np.pi, n_theta, endpoint=False)
    for s in range(0, z.shape[0], chunk):
        zc, uc = z[s:s + chunk], u[s:s + chunk]
        m = zc.shape[0]
        grid = np.stack([_first_exit(domain, zc, uc, np.full(m, th), rmax) for th in thetas], axis=1)
        best = grid.min(axis=1)
        if refine:
            j = grid.argmin(axis=1)
            step = 2 * np.pi / n_theta
            lo_t, hi_t = thetas[j] - step, thetas[j] + step
            g = (math.sqrt(5) - 1) / 2
            c = hi_t - g * (hi_t - lo_t)
            d = lo_t + g * (hi_t - lo_t)
            fc = _first_exit(domain, zc, uc, c, rmax)
            fd = _first_exit(domain, zc, uc, d, rmax)
            for _ in range(30):
                left = fc < fd
                hi_t = np.where(left, d, hi_t)
                lo_t = np.where(left, lo_t, c)
                nc = hi_t - g * (hi_t - lo_t)
                nd = lo_t + g * (hi_t - lo_t)
                c_new = np.where(left, nc, d)
                d_new = np.where(left, c, nd)
                fc_new = np.where(left, _first_exit(domain, zc, uc, nc, rmax), fd)
                fd_new = np.where(left, fc, _first_exit(domain, zc, uc, nd, rmax))
                c, d, fc, fd = c_new, d_new, fc_new, fd_new
            best = np.minimum(best, np.minimum(fc, fd))
        out[s:s + chunk] = best
    return out


def inscribed_disc_radius(domain: DomainSpec, z, v, refine: bool = True):
    """Largest R such that the affine disc z + R zeta v/|v|, |zeta| < 1, is inside."""
    z = np.asarray(z, dtype=complex)
    v = np.asarray(v, dtype=complex)
    shape = np.broadcast_shapes(z.shape, v.shape)
    z2 = np.broadcast_to(z, shape).reshape(-1, shape[-1])
    v2 = np.broadcast_to(v, shape).reshape(-1, shape[-1])
    u = v2 / norm(v2)[:, None]
    if isinstance(domain, UnitBall):
        r = _disc_radius_ball(z2, u)
    elif isinstance(domain, Ellipsoid):
        r = _disc_radius_ellipsoid(domain.a, z2, u)
    else:
        r = _disc_radius_generic(domain, z2, u, refine=refine)
        if isinstance(domain, LocalModelS9):
            r = np.minimum(r, _disc_radius_ball(z2, u, domain.cutoff))
    return r.reshape(shape[:-1])


def royden_upper(domain: DomainSpec, z, v, refine: bool = True):
    """Upper bound |v| / R for the Kobayashi-Royden metric (vectorized)."""
    r = inscribed_disc_radius(domain, z, v, refine=refine)
    with np.errstate(divide="ignore"):
        return np.where(r > 0, norm(v) / np.where(r > 0, r, 1.0), np.inf)


def royden_lower(domain: DomainSpec, z, v):
    radius, center = enclosing_ball(domain)
    return royden_in_ball(z, v, radius, center)


def royden_interval(domain: DomainSpec, z, v) -> IntervalValue:
    """Certified bracket [enclosing-ball metric, |v| / R] for the metric at (z, v)."""
    z = as_point(z, domain.dimension)
    v = as_point(v, domain.dimension)
    domain.check_region(z)
    if norm(v) == 0:
        raise ConfigurationError("vector must be nonzero")
    if not domain.contains(z):
        raise NumericError("point is not inside the domain", residual=float(domain.rho(z)))
    return IntervalValue(float(royden_lower(domain, z, v)), float(royden_upper(domain, z, v)))


def metric_function(domain: DomainSpec, backend: str = "interval", refine: bool = True):
    """Vectorized (z, v) -> metric value for the chosen backend."""
    if backend == "exact-ball":
        if not has_exact_backend(domain):
            raise CapabilityError(f"exact-ball backend unavailable for {domain.family}")
        return lambda z, v: royden_exact(domain, z, v)
    if backend == "interval":
        return lambda z, v: royden_upper(domain, z, v, refine=refine)
    raise ConfigurationError(f"unknown backend {backend!r}")


# ---------------------------------------------------------------------------
# estimator formulas


def _frame_delta(domain, z):
    f = boundary_frame(domain, z)
    require_delta(f.delta)
    return f


def ma_estimator(domain: DomainSpec, z, v) -> float:
    """|v_z| / delta + |v| / sqrt(delta) with the frame at z."""
    f = _frame_delta(domain, z)
    vn, _, _ = normal_components(f, v)
    return vn / f.delta + float(norm(np.asarray(v, dtype=complex))) / math.sqrt(f.delta)


def dini_upper_estimator(domain: DomainSpec, z, w, C: float) -> float:
    """log(1 + C |z-w| / sqrt(delta(z) delta(w)))."""
    fz, fw = _frame_delta(domain, z), _frame_delta(domain, w)
    d = float(norm(as_point(z) - as_point(w)))
    return math.log1p(C * d / math.sqrt(fz.delta * fw.delta))


@dataclass(frozen=True)
class LowerBound:
    """Certified lower bound plus the two non-certified estimator forms."""

    certified: float
    nt_product: float
    normal: float
    c: float

    def __float__(self):
        return self.certified

    @property
    def estimator_max(self) -> float:
        return max(self.certified, self.nt_product, self.normal)


def kobayashi_lower(domain: DomainSpec, z, w, c: float | None = None) -> LowerBound:
    """Enclosing-ball distance (certified) with the product and normal estimators."""
    c = DEFAULT_C if c is None else float(c)
    z = as_point(z, domain.dimension)
    w = as_point(w, domain.dimension)
    fz, fw = _frame_delta(domain, z), _frame_delta(domain, w)
    radius, center = enclosing_ball(domain)
    cert = float(kobayashi_in_ball(z, w, radius, center))
    d = float(norm(z - w))
    nt = math.log1p(c * d / math.sqrt(fz.delta)) + math.log1p(c * d / math.sqrt(fw.delta))
    vn, _, _ = normal_components(fz, z - w)
    normal = math.log1p(c * vn / math.sqrt(fz.delta * fw.delta))
    return LowerBound(certified=cert, nt_product=nt, normal=normal, c=c)


# ---------------------------------------------------------------------------
# path optimization


_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(8)
_GL_NODES = 0.5 * (_GL_NODES + 1.0)
_GL_WEIGHTS = 0.5 * _GL_WEIGHTS
_OUTSIDE = 1e12


def _ball_metric_and_grad(p, v, lin=None):
    """Metric of the ball (or of an ellipsoid via its linear image) with gradients.

    Works on realified arrays [Re, Im]; returns the metric and its real
    gradients with respect to p and v.
    """
    if lin is not None:
        lr = np.concatenate([lin, lin])
        p, v = lr * p, lr * v
    n = p.shape[1] // 2
    px, py, vx, vy = p[:, :n], p[:, n:], v[:, :n], v[:, n:]
    a = 1.0 - np.einsum("ij,ij->i", p, p)
    ok = a > 1e-300
    a = np.where(ok, a, 1.0)
    vv = np.einsum("ij,ij->i", v, v)
    pr = np.einsum("ij,ij->i", v, p)
    pi = np.einsum("ij,ij->i", vy, px) - np.einsum("ij,ij->i", vx, py)
    pp = pr * pr + pi * pi
    ia = 1.0 / a
    k = np.sqrt(vv * ia + pp * ia * ia)
    ik = 1.0 / k
    c1 = (ia * ik)[:, None]
    c2 = (ia * ia * ik)[:, None]
    pr_, pi_ = pr[:, None], pi[:, None]
    gv = c1 * v + c2 * np.concatenate([pr_ * px - pi_ * py, pr_ * py + pi_ * px], axis=1)
    gp = (c2 * vv[:, None]) * p + c2 * np.concatenate([pr_ * vx + pi_ * vy, pr_ * vy - pi_ * vx], axis=1) \
        + (2 * pp * ia ** 3 * ik)[:, None] * p
    if lin is not None:
        gp, gv = lr * gp, lr * gv
    return np.where(ok, k, np.inf), gp, gv, ok


class _PathObjective:
    """Length of the polyline z, x_1..x_{m-1}, w under a metric."""

    def __init__(self, domain, metric, z, w, analytic_lin=None, fd_step=1e-7):
        self.domain, self.metric = domain, metric
        self.z, self.w = z, w
        self.n = z.size
        self.lin = analytic_lin
        self.h = fd_step

    def points(self, x):
        inner_pts = to_complex(x.reshape(-1, 2 * self.n))
        return np.vstack([self.z, inner_pts, self.w])

    def _seg_costs(self, a, b):
        v = b - a
        q = _GL_NODES.size
        pts = a[:, None, :] + _GL_NODES[None, :, None] * v[:, None, :]
        vals = self.metric(pts.reshape(-1, self.n), np.repeat(v, q, axis=0)).reshape(-1, q)
        vals = np.where(np.isfinite(vals), vals, _OUTSIDE)
        return vals @ _GL_WEIGHTS

    def value(self, x):
        pts = self.points(x)
        return float(np.sum(self._seg_costs(pts[:-1], pts[1:])))

    def __call__(self, x):
        if self.lin is not None:
            return self._analytic(x)
        pts = self.points(x)
        base = self._seg_costs(pts[:-1], pts[1:])
        val = float(np.sum(base))
        m = pts.shape[0] - 2
        n2 = 2 * self.n
        # perturb each node coordinate; only its two adjacent segments change
        eye = np.eye(n2)
        pert = np.concatenate([to_complex(eye), to_complex(-eye)]) * self.h
        node = pts[1:-1]
        prev, nxt = pts[:-2], pts[2:]
        moved = node[:, None, :] + pert[None, :, :]
        k = pert.shape[0]
        left = self._seg_costs(np.repeat(prev, k, axis=0), moved.reshape(-1, self.n)).reshape(m, k)
        right = self._seg_costs(moved.reshape(-1, self.n), np.repeat(nxt, k, axis=0)).reshape(m, k)
        tot = left + right
        grad = (tot[:, :n2] - tot[:, n2:]) / (2 * self.h)
        if val >= _OUTSIDE:
            grad = np.zeros_like(grad)
        return val, grad.reshape(-1)

    def _analytic(self, x):
        n2 = 2 * self.n
        pts = np.vstack([to_real(self.z), x.reshape(-1, n2), to_real(self.w)])
        a, b = pts[:-1], pts[1:]
        v = b - a
        s = _GL_NODES.size
        p = (a[:, None, :] + _GL_NODES[None, :, None] * v[:, None, :]).reshape(-1, n2)
        k, gp, gv, ok = _ball_metric_and_grad(p, np.repeat(v, s, axis=0), self.lin)
        if not np.all(ok):
            return _OUTSIDE, np.zeros(x.size)
        wq = _GL_WEIGHTS[None, :, None]
        sq = _GL_NODES[None, :, None]
        gp = gp.reshape(-1, s, n2)
        gv = gv.reshape(-1, s, n2)
        ga = np.sum(wq * ((1 - sq) * gp - gv), axis=1)
        gb = np.sum(wq * (sq * gp + gv), axis=1)
        grad = ga[1:] + gb[:-1]
        val = float(k.reshape(-1, s) @ _GL_WEIGHTS @ np.ones(a.shape[0]))
        return val, grad.reshape(-1)


@dataclass(frozen=True)
class PathResult:
    value: float
    optimized: bool
    straight_value: float
    nodes: np.ndarray = field(repr=False)
    backend: str = "interval"

    def __float__(self):
        return self.value


def _resample(pts, m):
    """Resample a polyline to m segments uniformly in arc length."""
    seg = np.linalg.norm(np.diff(pts, axis=0), axis=1)
    cum = np.concatenate([[0.0], np.cumsum(seg)])
    if cum[-1] == 0:
        return np.repeat(pts[:1], m + 1, axis=0)
    target = np.linspace(0.0, cum[-1], m + 1)
    out = np.empty((m + 1, pts.shape[1]), dtype=complex)
    for j in range(pts.shape[1]):
        out[:, j] = np.interp(target, cum, pts[:, j].real) + 1j * np.interp(target, cum, pts[:, j].imag)
    return out


def _equal_metric(metric, pts, m, sub=16):
    """Resample a polyline to m segments of equal metric length."""
    a, v = pts[:-1], np.diff(pts, axis=0)
    s = (np.arange(sub) + 0.5) / sub
    q = a[:, None, :] + s[None, :, None] * v[:, None, :]
    vals = metric(q.reshape(-1, pts.shape[1]), np.repeat(v, sub, axis=0)) / sub
    vals = np.where(np.isfinite(vals), vals, 0.0)
    cum = np.concatenate([[0.0], np.cumsum(vals)])
    if cum[-1] <= 0:
        return _resample(pts, m)
    # parameter of each sub-piece boundary along the polyline
    par = np.concatenate([[0.0], (np.arange(a.shape[0])[:, None] + (np.arange(1, sub + 1) / sub)[None, :]).reshape(-1)])
    target = np.interp(np.linspace(0, cum[-1], m + 1), cum, par)
    idx = np.minimum(target.astype(int), a.shape[0] - 1)
    frac = target - idx
    out = a[idx] + frac[:, None] * v[idx]
    out[0], out[-1] = pts[0], pts[-1]
    return out


def _subdivide(pts):
    mids = 0.5 * (pts[:-1] + pts[1:])
    out = np.empty((2 * pts.shape[0] - 1, pts.shape[1]), dtype=complex)
    out[0::2] = pts
    out[1::2] = mids
    return out


def kobayashi_upper_path_detail(domain: DomainSpec, z, w, segments: int = 64,
                                backend: str = "interval", maxiter: int = 400,
                                final_rtol: float = 1e-9) -> PathResult:
    """Minimized integrated metric over polylines from z to w.

    Free interior nodes are optimized by L-BFGS, coarse to fine (4, 16, ...,
    ``segments`` pieces), from two seeds: the straight segment and an arc bowed
    toward the domain center.  The reported value is the refined quadrature of
    the best polyline, an upper bound for the distance.
    """
    if segments < 1:
        raise ConfigurationError("segments must be positive")
    z = as_point(z, domain.dimension)
    w = as_point(w, domain.dimension)
    for p in (z, w):
        if not domain.contains(p):
            raise NumericError("path endpoints must be interior", residual=float(domain.rho(p)))
    if norm(z - w) == 0:
        return PathResult(0.0, True, 0.0, np.vstack([z, w]), backend)
    metric = metric_function(domain, backend, refine=True)
    fast_metric = metric_function(domain, backend, refine=False) if backend == "interval" else metric
    lin = None
    if backend == "exact-ball":
        lin = np.ones(domain.dimension) if isinstance(domain, UnitBall) else domain.linearization

    def final_length(pts):
        curve = SampledCurve(np.linspace(0, 1, pts.shape[0]), pts)
        return curve_length(metric, curve, rtol=final_rtol)

    straight = np.linspace(0, 1, segments + 1)[:, None] * (w - z) + z
    straight_value = final_length(straight)

    obj_args = dict(analytic_lin=lin)
    levels = []
    m = 4
    while m < segments:
        levels.append(m)
        m *= 4
    levels.append(segments)

    center = domain.center
    mid = 0.5 * (z + w)
    bow = 0.5 * (center - mid)
    if norm(bow) > 0:
        bow *= min(1.0, 0.5 * float(norm(z - w)) / float(norm(bow)))

    def optimize(pts, m, ftol):
        pts = _equal_metric(fast_metric, pts, m)
        obj = _PathObjective(domain, fast_metric, z, w, **obj_args)
        x0 = to_real(pts[1:-1]).reshape(-1)
        start = obj.value(x0)
        if x0.size == 0:
            return pts, start, False
        try:
            res = minimize(obj, x0, jac=True, method="L-BFGS-B",
                           options={"maxiter": maxiter, "ftol": ftol, "gtol": 1e-7})
        except (ValueError, FloatingPointError, np.linalg.LinAlgError):
            return pts, start, False
        if res.fun < start and res.fun < _OUTSIDE:
            return obj.points(res.x), float(res.fun), True
        return pts, start, False

    # both seeds on the coarse levels, then refine the better one
    coarse, fine = levels[:1], levels[1:]
    candidates = []
    for seed in ("straight", "arc"):
        s = np.linspace(0, 1, levels[0] + 1)[:, None]
        pts = z + s * (w - z)
        if seed == "arc":
            pts = pts + 4 * s * (1 - s) * bow
            if not np.all(_inside(domain, pts[1:-1])):
                continue
        ok_any, val = False, np.inf
        for m in coarse:
            pts, val, ok = optimize(pts, m, 1e-9)
            ok_any |= ok
        candidates.append((val, pts, ok_any))
    val, pts, ok_any = min(candidates, key=lambda c: c[0])
    for i, m in enumerate(fine):
        pts, val, ok = optimize(pts, m, 1e-11 if i == len(fine) - 1 else 1e-9)
        ok_any |= ok
    try:
        best_val = final_length(pts)
    except NumericError:
        best_val = np.inf
    if not (np.isfinite(best_val) and best_val <= straight_value):
        return PathResult(straight_value, False, straight_value, straight, backend)
    return PathResult(best_val, ok_any, straight_value, pts, backend)


def kobayashi_upper_path(domain: DomainSpec, z, w, segments: int = 64,
                         backend: str = "interval") -> float:
    """Upper bound for the Kobayashi distance from an optimized polyline."""
    return kobayashi_upper_path_detail(domain, z, w, segments, backend).value


def kobayashi_interval(domain: DomainSpec, z, w, segments: int = 32,
                       backend: str = "interval") -> IntervalValue:
    """[certified lower, path upper] bracket for the distance."""
    low = kobayashi_lower(domain, z, w).certified
    up = kobayashi_upper_path(domain, z, w, segments, backend)
    return IntervalValue(low, up)


# ---------------------------------------------------------------------------
# comparison quantities


def lempert_disc_upper(domain: DomainSpec, z, w) -> float:
    """Lempert-function upper bound from the affine disc through z toward w."""
    z = as_point(z, domain.dimension)
    w = as_point(w, domain.dimension)
    d = float(norm(w - z))
    if d == 0:
        return 0.0
    best = np.inf
    for a, b in ((z, w), (w, z)):
        r = float(inscribed_disc_radius(domain, a, b - a))
        if d < r:
            best = min(best, math.atanh(d / r))
    return best


@dataclass(frozen=True)
class ComparisonRecord:
    g: float
    k_minus_c_bound: float
    k_over_c_bound: float
    l_minus_k_bound: float
    backend: str

    def to_record(self):
        return dict(self.__dict__)


def g_quantity(domain: DomainSpec, z, w) -> float:
    """|z-w| / (|z-w|^{1/2} + delta(z)^{1/2} + delta(w)^{1/2})."""
    z = as_point(z, domain.dimension)
    w = as_point(w, domain.dimension)
    fz, fw = _frame_delta(domain, z), _frame_delta(domain, w)
    d = float(norm(z - w))
    if d == 0:
        return 0.0
    return d / (math.sqrt(d) + math.sqrt(fz.delta) + math.sqrt(fw.delta))


def comparison_gap(domain: DomainSpec, z, w, backend: str = "interval",
                   segments: int = 32) -> ComparisonRecord:
    """The quantity g together with bounds on k - c, k / c and l - k.

    With the exact backend (ball and complex ellipsoids, both convex) all
    three distances coincide, so the bounds are 0, 1 and 0.  Otherwise
    c >= lower, k <= upper and l <= the affine-disc bound give the brackets.
    """
    g = g_quantity(domain, z, w)
    if backend == "exact-ball":
        if not has_exact_backend(domain):
            raise CapabilityError(f"exact-ball backend unavailable for {domain.family}")
        return ComparisonRecord(g, 0.0, 1.0, 0.0, backend)
    if norm(as_point(z) - as_point(w)) == 0:
        return ComparisonRecord(g, 0.0, 1.0, 0.0, backend)
    iv = kobayashi_interval(domain, z, w, segments, backend)
    l_up = lempert_disc_upper(domain, z, w)
    return ComparisonRecord(
        g=g,
        k_minus_c_bound=iv.upper - iv.lower,
        k_over_c_bound=iv.upper / iv.lower if iv.lower > 0 else np.inf,
        l_minus_k_bound=l_up - iv.lower,
        backend=backend,
    )


__all__ = [
    "IntervalValue", "EstimatorConstants", "BRACKET_AUDIT", "DEFAULT_C",
    "royden_interval", "royden_upper", "royden_lower", "inscribed_disc_radius",
    "ma_estimator", "kobayashi_upper_path", "kobayashi_upper_path_detail",
    "kobayashi_lower", "kobayashi_interval", "dini_upper_estimator",
    "comparison_gap", "g_quantity", "lempert_disc_upper", "enclosing_ball",
    "metric_function", "LowerBound", "PathResult", "ComparisonRecord",
]
