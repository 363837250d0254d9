"""Sampled curves and Finsler length quadrature."""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field

import numpy as np

from .domains import to_real


@dataclass(frozen=True)
class SampledCurve:
    """Ordered samples of a curve.

    ``breaks`` lists indices i whose segment i -> i+1 is a jump rather than a
    piece of the curve; such segments carry no length.
    """

    times: np.ndarray
    points: np.ndarray
    breaks: tuple = field(default=())

    def __post_init__(self):
        t = np.asarray(self.times, dtype=float)
        p = np.asarray(self.points, dtype=complex)
        if p.ndim != 2 or t.ndim != 1 or t.size != p.shape[0]:
            raise ValueError("times and points must have matching lengths")
        if t.size > 1 and np.any(np.diff(t) <= 0):
            raise ValueError("times must be strictly increasing")
        object.__setattr__(self, "times", t)
        object.__setattr__(self, "points", p)
        object.__setattr__(self, "breaks", tuple(sorted(int(b) for b in self.breaks)))

    def __len__(self):
        return self.times.size

    @property
    def dimension(self):
        return self.points.shape[1]

    def segment_mask(self) -> np.ndarray:
        """True for segments that belong to the curve."""
        mask = np.ones(max(len(self) - 1, 0), dtype=bool)
        for b in self.breaks:
            if 0 <= b < mask.size:
                mask[b] = False
        return mask

    def euclidean_length(self) -> float:
        seg = np.linalg.norm(np.diff(self.points, axis=0), axis=1)
        return float(np.sum(seg[self.segment_mask()]))

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        n = self.dimension
        writer.writerow(["time"] + [f"x{j + 1}" for j in range(n)] + [f"y{j + 1}" for j in range(n)])
        for t, p in zip(self.times, self.points):
            writer.writerow([repr(float(t))] + [repr(float(x)) for x in to_real(p)])
        return buf.getvalue()


def segment_lengths(metric, points: np.ndarray, subdivisions: int) -> np.ndarray:
    """Composite trapezoid of metric(p_i + s v_i; v_i) over s in [0, 1] per segment."""
    a = points[:-1]
    v = np.diff(points, axis=0)
    s = np.linspace(0.0, 1.0, subdivisions + 1)
    pts = a[:, None, :] + s[None, :, None] * v[:, None, :]
    vals = metric(pts.reshape(-1, points.shape[1]),
                  np.repeat(v, s.size, axis=0)).reshape(a.shape[0], s.size)
    wts = np.full(s.size, 1.0 / subdivisions)
    wts[0] = wts[-1] = 0.5 / subdivisions
    return vals @ wts


def curve_segment_lengths(metric, curve: SampledCurve, rtol: float = 1e-4,
                          max_subdivisions: int = 4096) -> np.ndarray:
    """Per-segment Finsler lengths refined until the total changes by < rtol.

    Successive trapezoid sums are combined by Richardson extrapolation.
    """
    if len(curve) < 2:
        return np.zeros(0)
    mask = curve.segment_mask()
    m = 1
    prev = segment_lengths(metric, curve.points, m)
    best = prev
    while m < max_subdivisions:
        m *= 2
        cur = segment_lengths(metric, curve.points, m)
        rich = (4.0 * cur - prev) / 3.0
        total_old, total_new = np.sum(best[mask]), np.sum(rich[mask])
        best = rich
        if abs(total_new - total_old) <= rtol * max(abs(total_new), 1e-300):
            break
        prev = cur
    if not np.all(np.isfinite(best[mask])):
        from .errors import NumericError
        raise NumericError("metric is not finite along the curve", residual=np.inf)
    return np.where(mask, best, 0.0)


def curve_length(metric, curve: SampledCurve, rtol: float = 1e-4) -> float:
    """Finsler length of the polyline through the curve samples."""
    return float(np.sum(curve_segment_lengths(metric, curve, rtol)))


__all__ = ["SampledCurve", "segment_lengths", "curve_segment_lengths", "curve_length"]
