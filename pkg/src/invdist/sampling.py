"""Seeded, regime-stratified pair samplers."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .domains import DomainSpec, UnitBall, inner, norm
from .errors import ConfigurationError, SamplingError
from .geometry import boundary_frame, raycast, tangent_basis

REGIMES = ("Transversal", "Tangential", "Mixed", "Interior")
# normal share |(z-w)_p| / |z-w| allowed per regime
SHARE_RANGE = {"Transversal": (0.5, 1.0), "Tangential": (0.0, 0.05), "Mixed": (0.0, 1.0)}
DRAW_CAP = 10 ** 6
BATCH = 2048
MIN_SEPARATION = 1e-9


@dataclass(frozen=True)
class SampleRegime:
    kind: str
    delta_range: tuple
    count: int
    seed: int = 0

    def __post_init__(self):
        if self.kind not in REGIMES:
            raise ConfigurationError(f"unknown regime {self.kind!r}; expected one of {REGIMES}")
        lo, hi = (float(x) for x in self.delta_range)
        if not (1e-12 <= lo <= hi):
            raise ConfigurationError("delta_range needs 1e-12 <= delta_min <= delta_max")
        if int(self.count) < 1:
            raise ConfigurationError("count must be positive")
        object.__setattr__(self, "delta_range", (lo, hi))
        object.__setattr__(self, "count", int(self.count))
        object.__setattr__(self, "seed", int(self.seed) % 2 ** 64)

    def scaled(self, factor: int) -> "SampleRegime":
        return SampleRegime(self.kind, self.delta_range, self.count * factor, self.seed)

    def to_record(self) -> dict:
        return {"kind": self.kind, "delta_min": self.delta_range[0],
                "delta_max": self.delta_range[1], "count": self.count, "seed": self.seed}


def _sphere(rng, m, n):
    v = rng.normal(size=(m, n)) + 1j * rng.normal(size=(m, n))
    return v / norm(v)[:, None]


def _log_uniform(rng, lo, hi, m):
    return np.exp(rng.uniform(math.log(lo), math.log(hi), m))


class _Draws:
    """Raw random numbers for one batch; consumed in a fixed order."""

    def __init__(self, rng, m, n):
        self.dir_z = _sphere(rng, m, n)
        self.dir_w = _sphere(rng, m, n)
        self.u_dz = rng.uniform(size=m)
        self.u_dw = rng.uniform(size=m)
        self.share = rng.uniform(size=m)
        self.phase = rng.uniform(0, 2 * np.pi, size=m)
        self.tangent = _sphere(rng, m, max(n - 1, 1))
        self.frac = rng.uniform(size=m)


def _boundary_points(domain, dirs):
    """Boundary point and outer normal hit from the center along each direction."""
    if isinstance(domain, UnitBall):
        return dirs, dirs
    c = domain.center
    ps, etas = [], []
    for d in dirs:
        t = raycast(domain, c, d)
        if t is None:
            ps.append(np.full(domain.dimension, np.nan, dtype=complex))
            etas.append(ps[-1])
            continue
        p = c + t * d
        g = domain.gradient(p)
        ps.append(p)
        etas.append(g / norm(g))
    return np.array(ps), np.array(etas)


def _deltas(domain, pts):
    if isinstance(domain, UnitBall):
        r = norm(pts)
        return np.where(r < 1, 1 - r, -1.0), pts / np.where(r > 0, r, 1)[:, None]
    out, etas = [], []
    for z in pts:
        if not np.all(np.isfinite(z)) or not domain.contains(z):
            out.append(-1.0)
            etas.append(np.full(domain.dimension, np.nan, dtype=complex))
            continue
        f = boundary_frame(domain, z)
        out.append(f.delta)
        etas.append(f.outer_normal)
    return np.array(out), np.array(etas)


def _exit_times(domain, z, u):
    if isinstance(domain, UnitBall):
        b = np.real(inner(z, u))
        return -b + np.sqrt(np.maximum(b * b + 1 - norm(z) ** 2, 0.0))
    out = []
    for zi, ui in zip(z, u):
        t = raycast(domain, zi, ui) if np.all(np.isfinite(zi)) else None
        out.append(np.nan if t is None else t)
    return np.array(out)


def _candidates(domain, regime, draws):
    lo, hi = regime.delta_range
    n = domain.dimension
    dz_target = np.exp(math.log(lo) + draws.u_dz * (math.log(hi) - math.log(lo)))
    p, eta_p = _boundary_points(domain, draws.dir_z)
    z = p - dz_target[:, None] * eta_p
    if regime.kind == "Interior":
        dw_target = np.exp(math.log(lo) + draws.u_dw * (math.log(hi) - math.log(lo)))
        q, eta_q = _boundary_points(domain, draws.dir_w)
        return z, q - dw_target[:, None] * eta_q
    if n < 2 and regime.kind == "Tangential":
        raise SamplingError("tangential regime needs dimension >= 2")
    s_lo, s_hi = SHARE_RANGE[regime.kind]
    share = s_lo + (s_hi - s_lo) * draws.share
    u = []
    for k in range(z.shape[0]):
        tb = tangent_basis(eta_p[k]) if np.all(np.isfinite(eta_p[k])) else np.zeros((n, max(n - 1, 0)))
        tau = tb @ draws.tangent[k][: tb.shape[1]] if tb.shape[1] else np.zeros(n, dtype=complex)
        u.append(share[k] * np.exp(1j * draws.phase[k]) * eta_p[k] + math.sqrt(1 - share[k] ** 2) * tau)
    u = np.array(u)
    t_exit = _exit_times(domain, z, u)
    # distance to the exit shrinks log-uniformly so both near and far w occur
    gap = np.exp(math.log(lo * 1e-2) + draws.frac * (0.0 - math.log(lo * 1e-2)))
    t = t_exit * (1.0 - np.minimum(gap, 1.0))
    return z, z + t[:, None] * u


def _accept(domain, regime, z, w):
    lo, hi = regime.delta_range
    tol = 1e-9
    dz, eta = _deltas(domain, z)
    dw, _ = _deltas(domain, w)
    ok_dz = (dz >= lo * (1 - tol)) & (dz <= hi * (1 + tol))
    ok_dw = (dw >= lo * (1 - tol)) & (dw <= hi * (1 + tol))
    diff = z - w
    nd = norm(diff)
    ok_sep = nd >= MIN_SEPARATION
    if regime.kind in SHARE_RANGE:
        s_lo, s_hi = SHARE_RANGE[regime.kind]
        share = np.abs(inner(diff, eta)) / np.where(nd > 0, nd, 1.0)
        ok_share = (share >= s_lo - 1e-12) & (share <= s_hi + 1e-12)
    else:
        ok_share = np.ones(z.shape[0], dtype=bool)
    return ok_dz, ok_dw, ok_sep, ok_share


def sample_pairs(domain: DomainSpec, regime: SampleRegime) -> list:
    """Deterministic pairs obeying the regime, by rejection in fixed-size batches.

    Candidates are drawn in batches of a fixed size from one stream, so the
    first k pairs do not depend on the requested count.
    """
    rng = np.random.default_rng(regime.seed)
    out = []
    drawn = 0
    fails = {"delta(z) range": 0, "delta(w) range": 0, "separation": 0, "normal share": 0}
    while len(out) < regime.count:
        if drawn >= DRAW_CAP:
            worst = max(fails, key=fails.get)
            raise SamplingError(
                f"rejection cap of {DRAW_CAP} draws exceeded for {regime.kind} "
                f"(most violated constraint: {worst}, {fails[worst]} rejections)")
        draws = _Draws(rng, BATCH, domain.dimension)
        drawn += BATCH
        with np.errstate(invalid="ignore"):
            z, w = _candidates(domain, regime, draws)
            a, b, c, d = _accept(domain, regime, z, w)
        for name, mask in zip(fails, (a, b, c, d)):
            fails[name] += int(np.sum(~mask))
        keep = np.nonzero(a & b & c & d)[0]
        for k in keep:
            out.append((z[k].copy(), w[k].copy()))
            if len(out) == regime.count:
                break
    return out


def normal_share(domain: DomainSpec, z, w) -> float:
    """|(z-w)_{pi(z)}| / |z-w|."""
    f = boundary_frame(domain, z)
    d = np.asarray(z, dtype=complex) - np.asarray(w, dtype=complex)
    return abs(complex(inner(d, f.outer_normal))) / float(norm(d))


__all__ = ["REGIMES", "SampleRegime", "sample_pairs", "normal_share", "DRAW_CAP"]
