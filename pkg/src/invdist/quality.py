"""(lambda, epsilon)-geodesic quality of sampled curves."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .ball import has_exact_backend, kobayashi_exact
from .bounds import kobayashi_lower, metric_function
from .curves import SampledCurve, curve_segment_lengths
from .domains import DomainSpec
from .errors import CapabilityError, ConfigurationError

LAMBDA_GRID = tuple(1.0 + 0.25 * k for k in range(13))
EPS_BUDGET = 1.0


@dataclass(frozen=True)
class GeodesicQuality:
    lam: float
    epsilon: float
    within_grid: bool
    eps_by_lambda: tuple

    def __post_init__(self):
        if self.lam < 1:
            raise ValueError("lambda must be at least 1")

    def to_record(self) -> dict:
        return {"lambda": self.lam, "epsilon": self.epsilon, "within_grid": self.within_grid}


def _pairwise_distance(domain, backend, pts):
    m = pts.shape[0]
    i, j = np.triu_indices(m, 1)
    if backend == "exact-ball":
        if not has_exact_backend(domain):
            raise CapabilityError(f"exact-ball backend unavailable for {domain.family}")
        k = kobayashi_exact(domain, pts[i], pts[j])
    elif backend == "interval":
        k = np.array([kobayashi_lower(domain, pts[a], pts[b]).certified for a, b in zip(i, j)])
    else:
        raise ConfigurationError(f"unknown backend {backend!r}")
    out = np.zeros((m, m))
    out[i, j] = k
    return out


def quasi_geodesic_quality(domain: DomainSpec, curve: SampledCurve, backend: str = "exact-ball",
                           max_points: int = 48, eps_budget: float = EPS_BUDGET,
                           rtol: float = 1e-6) -> GeodesicQuality:
    """Smallest grid lambda whose optimal epsilon stays within ``eps_budget``.

    For each lambda the optimal epsilon is max(0, max_{i<j} l(i, j) - lambda k(i, j))
    over a subsample of at most ``max_points`` curve samples.  With the
    interval backend k is the certified lower bound, so the result is
    conservative.  If no grid lambda meets the budget the largest one is
    returned with ``within_grid`` false.
    """
    if len(curve) < 2:
        return GeodesicQuality(1.0, 0.0, True, tuple((l, 0.0) for l in LAMBDA_GRID))
    metric = metric_function(domain, backend)
    seg = curve_segment_lengths(metric, curve, rtol=rtol)
    cum = np.concatenate([[0.0], np.cumsum(seg)])
    idx = np.unique(np.round(np.linspace(0, len(curve) - 1, min(max_points, len(curve)))).astype(int))
    pts = curve.points[idx]
    lengths = cum[idx][None, :] - cum[idx][:, None]
    k = _pairwise_distance(domain, backend, pts)
    iu = np.triu_indices(idx.size, 1)
    l_ij, k_ij = lengths[iu], k[iu]
    table = []
    for lam in LAMBDA_GRID:
        table.append((lam, float(max(0.0, np.max(l_ij - lam * k_ij)))))
    for lam, eps in table:
        if eps <= eps_budget:
            return GeodesicQuality(lam, eps, True, tuple(table))
    lam, eps = table[-1]
    return GeodesicQuality(lam, eps, False, tuple(table))


__all__ = ["GeodesicQuality", "quasi_geodesic_quality", "LAMBDA_GRID", "EPS_BUDGET"]
