"""Acceptance criteria 1-12, each run at its stated size and tolerance."""
import io
import json
import math
import time
from contextlib import redirect_stdout

import numpy as np
import pytest

from conftest import ACCEPTANCE_LINES
from invdist import BRACKET_AUDIT
from invdist.ball import kobayashi_ball, kobayashi_exact
from invdist.bounds import kobayashi_interval, kobayashi_upper_path
from invdist.cli import main as cli_main
from invdist.domains import Ellipsoid, LocalModelS9, UnitBall
from invdist.harness import (STABILITY_TOL, SuiteConfig, _geodesic_rows, calibrate_theorem1,
                             prop3_drift, rel_change, sandwich_holdout, verify_suite)
from invdist.reporting import rows_to_csv
from invdist.sampling import SampleRegime, sample_pairs

BALL = UnitBall(2)
KINDS = ("Transversal", "Tangential", "Mixed")
PAIRS = 10 ** 4
HOLDOUT = 10 ** 3


def record(number, passed, detail):
    line = f"criterion {number:>2}: {'PASS' if passed else 'FAIL'}  {detail}"
    ACCEPTANCE_LINES[number] = line
    print(line)
    assert passed, line


def regimes(total, delta_min, seed0=0):
    per = math.ceil(total / len(KINDS))
    return [SampleRegime(k, (delta_min, 0.9), per, seed0 + i) for i, k in enumerate(KINDS)]


@pytest.fixture(scope="module", autouse=True)
def audit():
    BRACKET_AUDIT.reset()
    yield


@pytest.fixture(scope="module")
def exact_fine():
    return calibrate_theorem1(BALL, "exact-ball", regimes(PAIRS, 1e-4))


@pytest.fixture(scope="module")
def exact_coarse():
    return calibrate_theorem1(BALL, "exact-ball", regimes(PAIRS, 1e-3), stability=False)


def test_criterion_01_upper_path_oracle():
    pairs = sample_pairs(BALL, SampleRegime("Mixed", (1e-3, 0.9), 100, seed=101))
    start = time.perf_counter()
    errs = []
    for z, w in pairs:
        up = kobayashi_upper_path(BALL, z, w, 64, backend="exact-ball")
        exact = kobayashi_ball(z, w)
        errs.append(abs(up - exact) / exact)
    elapsed = time.perf_counter() - start
    worst = max(errs)
    # certified brackets on a subset, plus the ellipsoid, feed the integrity check
    ell = Ellipsoid(2, coefficients=(1.0, 4.0))
    cases = [(BALL, z, w) for z, w in pairs[:25]]
    cases += [(ell, z, w) for z, w in sample_pairs(ell, SampleRegime("Mixed", (1e-3, 0.4), 25, seed=202))]
    missed = 0
    for dom, z, w in cases:
        iv = kobayashi_interval(dom, z, w, segments=8)
        missed += not iv.contains(float(kobayashi_exact(dom, z, w)), tol=1e-9)
    record(1, worst <= 5e-3 and elapsed < 60 and missed == 0,
           f"worst relative error {worst:.3g} (limit 5e-3), {elapsed:.1f} s (limit 60 s); "
           f"exact distance outside {missed} of {len(cases)} certified brackets")


def test_criterion_02_sandwich(exact_fine):
    s = exact_fine.summary
    held = sandwich_holdout(BALL, s["c_emp"], s["C_emp"], regimes(HOLDOUT, 1e-4, seed0=1000))
    drift = max(s["stability"]["c_emp"], s["stability"]["C_emp"])
    ok = (0 < s["c_emp"] < s["C_emp"] < math.inf and held["fraction"] >= 0.999
          and drift <= STABILITY_TOL and s["pairs"] >= PAIRS)
    record(2, ok, f"c_emp={s['c_emp']:.5g} C_emp={s['C_emp']:.5g} pairs={s['pairs']} "
                  f"holdout={held['fraction']:.4f} of {held['pairs']} doubling drift={drift:.3g}")


def test_criterion_03_bergman_branch():
    rep = calibrate_theorem1(BALL, "bergman", regimes(PAIRS, 1e-4))
    s = rep.summary
    drift = max(s["stability"]["c_emp"], s["stability"]["C_emp"])
    ok = 0 < s["c_emp"] < s["C_emp"] < math.inf and drift <= STABILITY_TOL
    record(3, ok, f"c_emp={s['c_emp']:.5g} C_emp={s['C_emp']:.5g} doubling drift={drift:.3g}")


def test_criterion_04_normal_lower_bound(exact_fine):
    s = exact_fine.summary
    per = {k: v["base"]["prop2_min"] for k, v in s["per_regime"].items()}
    drift = rel_change(s["prop2_min"], s["doubled"]["prop2_min"])
    ok = all(v > 0 for v in per.values()) and drift <= STABILITY_TOL
    detail = " ".join(f"{k}={v:.4g}" for k, v in per.items())
    record(4, ok, f"min={s['prop2_min']:.4g} ({detail}) doubling drift={drift:.3g}")


def test_criterion_05_balogh_bonk(exact_fine, exact_coarse):
    a, b = exact_coarse.summary["bb_sup"], exact_fine.summary["bb_sup"]
    growth = (b - a) / a
    record(5, math.isfinite(b) and growth <= STABILITY_TOL,
           f"sup|k-g| {a:.4g} at 1e-3, {b:.4g} at 1e-4, growth {growth:.3g}")


def test_criterion_06_length_ratios():
    rows = _geodesic_rows(SuiteConfig(samples=1000, delta_min=1e-4))
    gehring = max(r["gehring"] for r in rows)
    d = prop3_drift(rows)
    ok = len(rows) >= 1000 and gehring <= 1.58 + 1e-2 and d["drift"] <= STABILITY_TOL
    record(6, ok, f"{len(rows)} geodesics, max gehring {gehring:.4f} (limit 1.59), "
                  f"prop3 sup {d['sup_all']:.4g} drift {d['drift']:.3g}")


@pytest.fixture(scope="module")
def slices():
    cfg = SuiteConfig(samples=200, delta_min=1e-4)
    return verify_suite(BALL, "Prop4", cfg), verify_suite(BALL, "Thm5", cfg)


def test_criterion_07_bands(slices):
    prop4, thm5 = slices
    b = prop4.summary["bands"]
    parts = [f"{k}=[{v['min']:.3g},{v['max']:.3g}]" for k, v in b.items()]
    t = thm5.summary["band"]
    parts.append(f"balance=[{t['min']:.3g},{t['max']:.3g}] drift {thm5.summary['drift']:.3g}")
    prop4_ok = all(v["spread"] <= 10 for v in b.values()) and all(
        d <= STABILITY_TOL for d in prop4.summary["drift"].values())
    record(7, prop4_ok and thm5.passed, " ".join(parts))


def test_criterion_08_tangency(slices):
    worst = slices[0].summary["max_tangency_defect"]
    record(8, len(slices[0].rows) == 200 and worst <= 1e-6,
           f"max tangency defect {worst:.3g} over {len(slices[0].rows)} slices (limit 1e-6)")


def test_criterion_09_s9_example():
    buf = io.StringIO()
    with redirect_stdout(buf):
        code = cli_main(["example-s9", "--levels", "4", "--format", "json"])
    summary = json.loads(buf.getvalue())
    factors = summary["factors"]
    ok = code == 0 and len(summary["ratios"]) == 4 and all(f >= 2 for f in factors)
    record(9, ok, "ratios " + ", ".join(f"{r:.4g}" for r in summary["ratios"])
                  + "; factors " + ", ".join(f"{f:.3f}" for f in factors))


def test_criterion_10_slc_consistency():
    cfg = SuiteConfig()
    ball = verify_suite(BALL, "SLC", cfg)
    ell = verify_suite(Ellipsoid(2, coefficients=(1.0, 4.0)), "SLC", cfg)
    s9 = verify_suite(LocalModelS9(), "SLC", cfg)
    ok = ball.passed and ell.passed and s9.passed
    record(10, ok, f"ball err {ball.summary['relative_error']:.3g}, ellipsoid err "
                   f"{ell.summary['relative_error']:.3g}, S9 c4 {s9.summary['c4_first']:.3g} -> "
                   f"{s9.summary['c4_last']:.3g}")


def test_criterion_11_bracket_integrity():
    snap = BRACKET_AUDIT.snapshot()
    record(11, snap["produced"] > 0 and snap["violations"] == 0,
           f"{snap['produced']} intervals produced, {snap['violations']} violations")


def test_criterion_12_determinism():
    cfg = SuiteConfig(samples=30, delta_min=1e-3, seed=7)
    cases = [(BALL, s) for s in ("Prop2", "BaloghBonk", "Symmetry", "Prop3", "GehringHayman",
                                 "Prop4", "Thm5", "SLC")] + [(LocalModelS9(), "S9Example")]
    same = []
    for dom, suite in cases:
        a = rows_to_csv(verify_suite(dom, suite, cfg).rows, suite)
        b = rows_to_csv(verify_suite(dom, suite, cfg).rows, suite)
        same.append(a.encode() == b.encode())
    record(12, all(same), f"{sum(same)} of {len(same)} suites reproduce byte-identical CSV")
