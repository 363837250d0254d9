"""Calibration of the sandwich constants and the verification suites."""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .ball import (bergman_distance_ball, disc_automorphism, has_exact_backend,
                   kobayashi_exact, real_geodesic_ball, royden_ball, slice_disc)
from .bounds import BRACKET_AUDIT, IntervalValue, kobayashi_interval
from .curves import curve_length
from .domains import DomainSpec, Ellipsoid, LocalModelS9, UnitBall, norm
from .errors import CapabilityError, ConfigurationError, InvdistError, NumericError
from .estimators import batch_quantities, s9_ratios, slc_ratio_scan
from .geodesics import (boundary_normal_share, disc_invariants, length_ratios,
                        reparametrize_max_delta, theorem5_balance)
from .geometry import DELTA_FLOOR, slc_lambda
from .sampling import SampleRegime, sample_pairs

log = logging.getLogger(__name__)

STABILITY_TOL = 0.10
CALIBRATION_BACKENDS = ("exact-ball", "interval", "bergman")
SUITES = ("Prop2", "Prop3", "Prop4", "Thm5", "BaloghBonk", "Symmetry",
          "GehringHayman", "S9Example", "SLC")
GEHRING_LIMIT = 1.58 + 1e-2
BAND_LIMIT = 10.0
TANGENCY_LIMIT = 1e-6
ZERO_FLOOR = 1e-12


def rel_change(a: float, b: float) -> float:
    """|b - a| / |a| (0 when both vanish)."""
    if a == b:
        return 0.0
    return abs(b - a) / abs(a) if a != 0 else math.inf


# ---------------------------------------------------------------------------
# distances for calibration


def bergman_inner_distance(z, w, rtol: float = 1e-4) -> float:
    """Bergman length of the ball geodesic from z to w, refined to rtol."""
    n = np.asarray(z).size
    scale = math.sqrt(n + 1)
    metric = lambda p, v: scale * royden_ball(p, v)
    samples, prev = 17, None
    while True:
        cur = curve_length(metric, real_geodesic_ball(z, w, samples), rtol=rtol)
        if prev is not None and abs(cur - prev) <= rtol * cur:
            return cur
        if samples > 4097:
            raise NumericError("Bergman length did not converge", residual=abs(cur - prev))
        prev, samples = cur, 2 * samples - 1


def _distances(domain, backend, z, w):
    """(lower, upper) arrays of the distance being calibrated."""
    if backend == "exact-ball":
        if not has_exact_backend(domain):
            raise CapabilityError(f"exact-ball backend unavailable for {domain.family}")
        k = kobayashi_exact(domain, z, w)
        return k, k
    if backend == "bergman":
        if not isinstance(domain, UnitBall):
            raise CapabilityError("Bergman distance is available on the unit ball only")
        b = np.array([bergman_inner_distance(a, c) for a, c in zip(z, w)])
        return b, b
    if backend == "interval":
        lo, up = [], []
        for a, c in zip(z, w):
            iv = kobayashi_interval(domain, a, c)
            lo.append(iv.lower)
            up.append(iv.upper)
        return np.array(lo), np.array(up)
    raise ConfigurationError(f"unknown backend {backend!r}; expected one of {CALIBRATION_BACKENDS}")


# ---------------------------------------------------------------------------
# calibration


@dataclass
class CalibrationReport:
    domain: dict
    backend: str
    regimes: list
    rows: list
    summary: dict
    skipped: int = 0
    excluded: int = 0

    @property
    def c_emp(self) -> float:
        return self.summary["c_emp"]

    @property
    def C_emp(self) -> float:
        return self.summary["C_emp"]

    def to_summary(self) -> dict:
        return {"domain": self.domain, "backend": self.backend, "regimes": self.regimes,
                "skipped": self.skipped, "excluded": self.excluded, **self.summary}


def _regime_rows(domain, backend, regime, base_count):
    pairs = sample_pairs(domain, regime)
    z = np.array([p[0] for p in pairs])
    w = np.array([p[1] for p in pairs])
    keep = norm(z - w) >= 1e-9
    excluded = int(np.sum(~keep))
    z, w = z[keep], w[keep]
    q = batch_quantities(domain, z, w)
    ok = (q["delta_z"] >= DELTA_FLOOR) & (q["delta_w"] >= DELTA_FLOOR)
    for k in np.nonzero(~ok)[0]:
        log.warning("skipping pair %d of %s: boundary distance below floor", k, regime.kind)
    lo, up = _distances(domain, backend, z[ok], w[ok])
    rows = []
    idx = np.nonzero(ok)[0]
    for j, k in enumerate(idx):
        A = float(q["A"][k])
        nm = float(q["normal_mag"][k])
        sq = math.sqrt(q["delta_z"][k] * q["delta_w"][k])
        rows.append({
            "pair_id": int(k), "regime": regime.kind, "seed": regime.seed,
            "half": "base" if k < base_count else "extra", "backend": backend,
            "z": z[k], "w": w[k],
            "delta_z": float(q["delta_z"][k]), "delta_w": float(q["delta_w"][k]),
            "A": A, "g": float(q["g"][k]), "normal_mag": nm,
            "k_lower": float(lo[j]), "k_upper": float(up[j]),
            "ratio_low": math.expm1(lo[j]) / A, "ratio_high": math.expm1(up[j]) / A,
            "prop2": math.expm1(lo[j]) * sq / nm if nm > 0 else math.nan,
        })
    return rows, int(np.sum(~ok)), excluded


def _summarize(rows):
    low = np.array([r["ratio_low"] for r in rows])
    high = np.array([r["ratio_high"] for r in rows])
    p2 = np.array([r["prop2"] for r in rows])
    bb = np.array([max(abs(r["k_upper"] - r["g"]), abs(r["k_lower"] - r["g"])) for r in rows])
    dz = np.array([r["delta_z"] for r in rows])
    dw = np.array([r["delta_w"] for r in rows])
    strp = 0.5 * np.abs(np.log(dz / dw)) - np.array([r["k_lower"] for r in rows])
    finite_p2 = p2[np.isfinite(p2)]
    return {"c_emp": float(low.min()), "C_emp": float(high.max()),
            "prop2_min": float(finite_p2.min()) if finite_p2.size else math.nan,
            "bb_sup": float(bb.max()), "strpsc_c": float(strp.max()),
            "pairs": len(rows)}


def calibrate_theorem1(domain: DomainSpec, backend: str, regimes: list,
                       stability: bool = True) -> CalibrationReport:
    """Empirical (c, C) from per-pair ratios (e^k - 1) / A.

    With ``stability`` every regime is sampled at twice its count; because
    the sampler is prefix-stable the first half is the base sample and the
    constants are recomputed on the full set to measure their drift.
    """
    if backend not in CALIBRATION_BACKENDS:
        raise ConfigurationError(f"unknown backend {backend!r}; expected one of {CALIBRATION_BACKENDS}")
    if backend == "exact-ball" and not has_exact_backend(domain):
        raise CapabilityError(f"exact-ball backend unavailable for {domain.family}")
    if backend == "bergman" and not isinstance(domain, UnitBall):
        raise CapabilityError("Bergman distance is available on the unit ball only")
    rows, skipped, excluded = [], 0, 0
    per_regime = {}
    for regime in regimes:
        sampled = regime.scaled(2) if stability else regime
        r, s, e = _regime_rows(domain, backend, sampled, regime.count)
        rows.extend(r)
        skipped += s
        excluded += e
        base = [x for x in r if x["half"] == "base"]
        per_regime[regime.kind] = {"base": _summarize(base)}
        if stability:
            per_regime[regime.kind]["doubled"] = _summarize(r)
    base_rows = [x for x in rows if x["half"] == "base"]
    summary = dict(_summarize(base_rows))
    if stability:
        doubled = _summarize(rows)
        summary["doubled"] = doubled
        summary["stability"] = {k: rel_change(summary[k], doubled[k])
                                for k in ("c_emp", "C_emp", "prop2_min", "bb_sup")}
    summary["per_regime"] = per_regime
    return CalibrationReport(domain.describe(), backend, [r.to_record() for r in regimes],
                             rows, summary, skipped, excluded)


def sandwich_holdout(domain: DomainSpec, c_emp: float, C_emp: float, regimes: list,
                     backend: str = "exact-ball") -> dict:
    """Fraction of held-out pairs with log(1 + c A) <= k <= log(1 + C A)."""
    total, good, rows = 0, 0, []
    for regime in regimes:
        r, _, _ = _regime_rows(domain, backend, regime, regime.count)
        for x in r:
            ok = (math.log1p(c_emp * x["A"]) <= x["k_lower"] * (1 + 1e-12)
                  and x["k_upper"] <= math.log1p(C_emp * x["A"]) * (1 + 1e-12))
            total += 1
            good += ok
            rows.append({**x, "inside": ok})
    return {"pairs": total, "inside": good, "fraction": good / total if total else math.nan,
            "rows": rows}


# ---------------------------------------------------------------------------
# verification suites


@dataclass
class SuiteConfig:
    samples: int = 200
    seed: int = 0
    delta_min: float = 1e-4
    delta_max: float = 0.9
    delta_exponent: float = 3.0
    levels: int = 4
    backend: str = "exact-ball"
    point: object = None
    radii: tuple = (0.2, 0.1, 0.05, 0.025, 0.0125)


@dataclass
class SuiteReport:
    suite: str
    passed: bool
    summary: dict
    rows: list = field(default_factory=list)
    notes: list = field(default_factory=list)

    def to_summary(self) -> dict:
        return {"suite": self.suite, "passed": self.passed, "notes": self.notes, **self.summary}


def _require_ball(domain, suite):
    if not isinstance(domain, UnitBall):
        raise CapabilityError(f"suite {suite} needs exact ball geodesics (unit ball only)")


def _require_exact(domain, suite):
    if not has_exact_backend(domain):
        raise CapabilityError(f"suite {suite} needs the exact backend")


def _calib_regimes(cfg, delta_min=None):
    dmin = cfg.delta_min if delta_min is None else delta_min
    n = max(1, cfg.samples // 3)
    return [SampleRegime(kind, (dmin, cfg.delta_max), n, cfg.seed + i)
            for i, kind in enumerate(("Transversal", "Tangential", "Mixed"))]


def _suite_prop2(domain, cfg):
    _require_exact(domain, "Prop2")
    rep = calibrate_theorem1(domain, "exact-ball", _calib_regimes(cfg))
    per = {k: (v["base"]["prop2_min"], v["doubled"]["prop2_min"]) for k, v in rep.summary["per_regime"].items()}
    # stability is judged on the pooled minimum; per-regime minima are noisier and only reported
    drift = rel_change(rep.summary["prop2_min"], rep.summary["doubled"]["prop2_min"])
    passed = all(a > 0 and b > 0 for a, b in per.values()) and drift < STABILITY_TOL
    summary = {"prop2_min": rep.summary["prop2_min"], "per_regime": per, "drift": drift,
               "regime_drift": {k: rel_change(a, b) for k, (a, b) in per.items()}}
    return SuiteReport("Prop2", passed, summary, rep.rows)


def _suite_balogh_bonk(domain, cfg):
    _require_exact(domain, "BaloghBonk")
    coarse = calibrate_theorem1(domain, "exact-ball", _calib_regimes(cfg, cfg.delta_min * 10), stability=False)
    fine = calibrate_theorem1(domain, "exact-ball", _calib_regimes(cfg), stability=False)
    a, b = coarse.summary["bb_sup"], fine.summary["bb_sup"]
    growth = (b - a) / a if a > 0 else math.inf
    passed = math.isfinite(a) and math.isfinite(b) and growth <= STABILITY_TOL
    summary = {"bb_sup_coarse": a, "bb_sup_fine": b, "growth": growth,
               "delta_min_coarse": cfg.delta_min * 10, "delta_min_fine": cfg.delta_min}
    notes = ["g uses the Box-Ball proxy, so only boundedness is tested"]
    return SuiteReport("BaloghBonk", passed, summary, fine.rows, notes)


def _symmetry_max(domain, cfg, factor):
    worst, rows = 0.0, []
    for regime in _calib_regimes(cfg):
        pairs = sample_pairs(domain, regime.scaled(factor))
        z = np.array([p[0] for p in pairs])
        w = np.array([p[1] for p in pairs])
        ab = batch_quantities(domain, z, w)["A"]
        ba = batch_quantities(domain, w, z)["A"]
        ratio = np.maximum(ab / ba, ba / ab)
        worst = max(worst, float(ratio.max()))
        rows.extend({"regime": regime.kind, "z": z[i], "w": w[i], "A_zw": float(ab[i]),
                     "A_wz": float(ba[i]), "ratio": float(ratio[i])} for i in range(len(pairs)))
    return worst, rows


def _suite_symmetry(domain, cfg):
    base, _ = _symmetry_max(domain, cfg, 1)
    doubled, rows = _symmetry_max(domain, cfg, 2)
    drift = rel_change(base, doubled)
    passed = math.isfinite(doubled) and drift < STABILITY_TOL
    return SuiteReport("Symmetry", passed, {"max_ratio": base, "max_ratio_doubled": doubled,
                                            "drift": drift}, rows)


def _geodesic_rows(cfg, per_s=None, grid=10):
    rng = np.random.default_rng(cfg.seed)
    per_s = per_s or max(1, cfg.samples // grid)
    rows = []
    for s in np.geomspace(cfg.delta_min, 0.5, grid):
        for _ in range(per_s):
            u = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
            u /= norm(u)[:, None]
            z, w = (1 - s) * u[0], (1 - s) * u[1]
            ratios = length_ratios(UnitBall(2), real_geodesic_ball(z, w, 1001))
            rows.append({"s": float(s), "z": z, "w": w, **ratios})
    return rows


def prop3_drift(rows) -> dict:
    """Per-s maxima of the prop3 ratio and growth of the running supremum.

    The drift is the relative increase of the supremum when the s grid is
    extended from its larger half down to the smallest s.
    """
    svals = sorted({r["s"] for r in rows}, reverse=True)
    maxima = [max(r["prop3"] for r in rows if r["s"] == s) for s in svals]
    half = max(1, len(svals) // 2)
    upper = max(maxima[:half])
    overall = max(maxima)
    return {"s_grid": svals, "per_s_max": maxima, "sup_large_s": upper,
            "sup_all": overall, "drift": (overall - upper) / upper}


def _suite_prop3(domain, cfg):
    _require_ball(domain, "Prop3")
    rows = _geodesic_rows(cfg)
    d = prop3_drift(rows)
    passed = math.isfinite(d["sup_all"]) and d["drift"] <= STABILITY_TOL
    return SuiteReport("Prop3", passed, d, rows)


def _suite_gehring(domain, cfg):
    _require_ball(domain, "GehringHayman")
    rows = _geodesic_rows(cfg)
    worst = max(r["gehring"] for r in rows)
    return SuiteReport("GehringHayman", worst <= GEHRING_LIMIT,
                       {"max_gehring": worst, "limit": GEHRING_LIMIT}, rows)


def random_slices(count: int, seed: int, s_min: float = 1e-4, dimension: int = 2):
    """Reparametrized ball slices whose maximal boundary distance is s."""
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(count):
        s = 10 ** rng.uniform(math.log10(s_min), 0.0)
        c = rng.normal(size=dimension) + 1j * rng.normal(size=dimension)
        c *= (1 - s) / norm(c)
        v = rng.normal(size=dimension) + 1j * rng.normal(size=dimension)
        twist = disc_automorphism(0.5 * rng.uniform() * np.exp(1j * rng.uniform(0, 2 * np.pi)),
                                  rng.uniform(0, 2 * np.pi))
        out.append((s, slice_disc(c, v).precompose(twist), rng))
    return out


def _band(values):
    v = np.asarray(values, dtype=float)
    lo, hi = float(v.min()), float(v.max())
    return {"min": lo, "max": hi, "spread": hi / lo if lo > 0 else math.inf}


def _slice_table(count, seed, s_min, pairs_per_slice=0):
    ball = UnitBall(2)
    rows, balance = [], []
    for i, (s, disc, rng) in enumerate(random_slices(count, seed, s_min)):
        d = reparametrize_max_delta(ball, disc)
        inv = disc_invariants(ball, d)
        share = float(np.max(boundary_normal_share(ball, d)))
        row = {"slice": i, "s": s, **inv.to_record(),
               "de_over_rootD": inv.diameter / math.sqrt(inv.max_delta),
               "deriv_over_de": inv.max_derivative / inv.diameter,
               "boundary_share_over_de": share / inv.diameter}
        for _ in range(pairs_per_slice):
            a, b = np.sqrt(rng.uniform(0, 1, 2)) * 0.999 * np.exp(1j * rng.uniform(0, 2 * np.pi, 2))
            balance.append({"slice": i, "s": s, "zeta_z": complex(a), "zeta_w": complex(b),
                            "balance": theorem5_balance(ball, d, d(a), d(b), inv.diameter)})
        rows.append(row)
    return rows, balance


def _suite_prop4(domain, cfg):
    _require_ball(domain, "Prop4")
    keys = ("de_over_rootD", "deriv_over_de", "boundary_share_over_de")
    base, _ = _slice_table(cfg.samples, cfg.seed, cfg.delta_min)
    doubled, _ = _slice_table(2 * cfg.samples, cfg.seed, cfg.delta_min)
    bands = {k: _band([r[k] for r in base]) for k in keys}
    bands2 = {k: _band([r[k] for r in doubled]) for k in keys}
    drift = {k: max(rel_change(bands[k]["min"], bands2[k]["min"]),
                    rel_change(bands[k]["max"], bands2[k]["max"])) for k in keys}
    tangency = max(r["tangency_defect"] for r in base)
    passed = (all(bands[k]["spread"] <= BAND_LIMIT for k in keys)
              and all(d <= STABILITY_TOL for d in drift.values()))
    summary = {"bands": bands, "bands_doubled": bands2, "drift": drift,
               "max_tangency_defect": tangency, "tangency_pass": tangency <= TANGENCY_LIMIT}
    return SuiteReport("Prop4", passed and tangency <= TANGENCY_LIMIT, summary, base)


def _suite_thm5(domain, cfg):
    _require_ball(domain, "Thm5")
    _, base = _slice_table(cfg.samples, cfg.seed, cfg.delta_min, pairs_per_slice=5)
    _, doubled = _slice_table(2 * cfg.samples, cfg.seed, cfg.delta_min, pairs_per_slice=5)
    b1 = _band([r["balance"] for r in base])
    b2 = _band([r["balance"] for r in doubled])
    drift = max(rel_change(b1["min"], b2["min"]), rel_change(b1["max"], b2["max"]))
    passed = b1["spread"] <= BAND_LIMIT and drift <= STABILITY_TOL
    return SuiteReport("Thm5", passed, {"band": b1, "band_doubled": b2, "drift": drift}, base)


def s9_levels(levels: int = 4, delta_exponent: float = 3.0, eps0: float = 0.1) -> dict:
    """The local-model sequence over halving eps, with per-level decrease factors."""
    eps = eps0 * 0.5 ** np.arange(levels)
    rows = s9_ratios(eps, delta_exponent)
    ratios = [r["ratio"] for r in rows]
    factors = [ratios[i] / ratios[i + 1] for i in range(len(ratios) - 1)]
    return {"rows": rows, "ratios": ratios, "factors": factors,
            "strictly_decreasing": all(f > 1 for f in factors),
            "halving": all(f >= 2 for f in factors), "delta_exponent": delta_exponent}


def _suite_s9(domain, cfg):
    if not isinstance(domain, LocalModelS9):
        raise CapabilityError("suite S9Example runs on the local model domain only")
    res = s9_levels(cfg.levels, cfg.delta_exponent)
    summary = {k: v for k, v in res.items() if k != "rows"}
    return SuiteReport("S9Example", res["strictly_decreasing"], summary, res["rows"])


def default_scan_point(domain: DomainSpec):
    n = domain.dimension
    if isinstance(domain, LocalModelS9):
        return np.zeros(n, dtype=complex)
    if isinstance(domain, Ellipsoid):
        v = np.zeros(n, dtype=complex)
        v[0], v[-1] = 0.6, 0.4j
        return v / math.sqrt(float(np.sum(domain.a * np.abs(v) ** 2)))
    if isinstance(domain, UnitBall):
        v = np.zeros(n, dtype=complex)
        v[0] = 1.0
        return v
    raise ConfigurationError(f"no default scan point for {domain.family}; pass one")


def _suite_slc(domain, cfg):
    p = default_scan_point(domain) if cfg.point is None else np.asarray(cfg.point, dtype=complex)
    rows = slc_ratio_scan(domain, p, cfg.radii, seed=cfg.seed)
    lam = slc_lambda(domain, p)
    c4 = [r["c4_est"] for r in rows]
    c3_last = rows[-1]["c3_est"]
    if isinstance(domain, LocalModelS9):
        # values below the floor are round-off of an identically vanishing ratio
        passed = c4[-1] <= 0.1 * c4[0] or c4[-1] <= ZERO_FLOOR
        summary = {"c4_first": c4[0], "c4_last": c4[-1], "lambda": lam, "zero_floor": ZERO_FLOOR}
    else:
        err = abs(c3_last - lam) / lam if lam > 0 else math.inf
        passed = err <= 0.10
        summary = {"lambda": lam, "c3_last": c3_last, "relative_error": err}
    summary["c2_le_c3"] = all(r["c2_est"] <= r["c3_est"] + 1e-15 for r in rows)
    return SuiteReport("SLC", passed, summary, rows)


_SUITE_FUNCS = {
    "Prop2": _suite_prop2, "Prop3": _suite_prop3, "Prop4": _suite_prop4, "Thm5": _suite_thm5,
    "BaloghBonk": _suite_balogh_bonk, "Symmetry": _suite_symmetry,
    "GehringHayman": _suite_gehring, "S9Example": _suite_s9, "SLC": _suite_slc,
}


def verify_suite(domain: DomainSpec, suite: str, config: SuiteConfig | None = None) -> SuiteReport:
    """Run one verification suite; capability checks happen before sampling."""
    if suite not in _SUITE_FUNCS:
        raise ConfigurationError(f"unknown suite {suite!r}; expected one of {SUITES}")
    cfg = config or SuiteConfig()
    before = BRACKET_AUDIT.snapshot()
    report = _SUITE_FUNCS[suite](domain, cfg)
    after = BRACKET_AUDIT.snapshot()
    report.summary["brackets"] = {"produced": after["produced"] - before["produced"],
                                  "violations": after["violations"] - before["violations"]}
    return report


__all__ = [
    "CalibrationReport", "calibrate_theorem1", "sandwich_holdout", "bergman_inner_distance",
    "SuiteConfig", "SuiteReport", "verify_suite", "SUITES", "s9_levels", "prop3_drift",
    "random_slices", "default_scan_point", "rel_change",
]
