"""Acceptance battery: twelve end-to-end gates, one pass/fail line each.

Run with `pytest tests/test_acceptance.py -s` (or directly as a script) to see
the lines. Each gate states its tolerance and its measured margin; every
randomized gate runs at a frozen seed so reruns are bit-identical.
"""

import math
import time

import numpy as np
from numpy.polynomial import chebyshev as cheb
from scipy import integrate

from bosonlab.distribution import anticoncentration_experiment, full_distribution
from bosonlab.embedding import (
    build_embedding,
    build_embedding_gbs,
    verify_embedding_gbs_identity,
    verify_embedding_identity,
)
from bosonlab.fock import (
    click_concentration_check,
    click_count,
    click_stats,
    dim_fock,
    enumerate_outcomes,
    sample_uniform_outcome,
)
from bosonlab.gbs import gbs_normalization_experiment, photon_number_pmf
from bosonlab.interpolation import (
    PolySamplePath,
    blowup_scaling_experiment,
    end_to_end_smuggle_demo,
    fit_and_extrapolate,
    make_smuggle_path,
    path_value,
    sample_grid,
)
from bosonlab.permanent import per_exact, per_exact_int, per_oracle
from bosonlab.randmat import (
    haar_unitary,
    inverse_gap_moment_experiment,
    max_sv_tail_experiment,
    sphere_lemma_experiments,
)
from bosonlab.rng import stream


def _gate(ok: bool, label: str) -> None:
    print(f"{'PASS' if ok else 'FAIL'}: {label}")
    assert ok, label


def test_gate_01_permanent_kernels_agree():
    # 1000 random complex matrices per size, subset kernel vs permutation sum
    t0 = time.monotonic()
    worst = 0.0
    for n in range(2, 10):
        rng = stream(20260814, n)
        for _ in range(1000):
            a = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
            ref = per_oracle(a)
            worst = max(worst, abs(per_exact(a) - ref) / abs(ref))
    wall = time.monotonic() - t0
    _gate(
        worst <= 1e-10 and wall < 30.0,
        f"permanent kernels agree on 8000 matrices, n=2..9 "
        f"(worst rel err {worst:.2e} <= 1e-10, {wall:.1f}s < 30s)",
    )


def test_gate_02_outcome_distribution_normalizes():
    t0 = time.monotonic()
    worst = 0.0
    for m, n in [(4, 2), (6, 3), (8, 4)]:
        for k in range(20):
            u = haar_unitary(m, seed=1000 + k, stream_id=k).matrix
            worst = max(worst, abs(sum(full_distribution(u, m, n).values()) - 1.0))
    wall = time.monotonic() - t0
    _gate(
        worst <= 1e-9 and wall < 60.0,
        f"outcome probabilities sum to 1 for 60 Haar draws at (4,2),(6,3),(8,4) "
        f"(worst |sum-1| {worst:.2e} <= 1e-9, {wall:.1f}s < 60s)",
    )


def test_gate_03_embedding_identity_exact():
    t0 = time.monotonic()
    rng = stream(314159, 0)
    failures = 0
    for _ in range(500):
        n = int(rng.integers(1, 10))
        m = int(rng.integers(n, 2 * n + 4))
        s = sample_uniform_outcome(m, n, rng)
        c = click_stats(s).clicks
        x = rng.integers(0, 2, size=(c, c))
        if not verify_embedding_identity(build_embedding(x, s))[2]:
            failures += 1
    # worked example: S=(4,3,1) multiplies the base permanent by exactly 144
    x = np.ones((3, 3), dtype=np.int64)
    spec = build_embedding(x, (4, 3, 1))
    lhs = per_exact_int(spec.a_s)
    anchor_ok = lhs == per_exact_int(x) * 144 == 864
    wall = time.monotonic() - t0
    _gate(
        failures == 0 and anchor_ok and wall < 60.0,
        f"single-pattern embedding identity exact on 500 random instances, n<=9, "
        f"and S=(4,3,1) factor is exactly 144 ({failures} failures, {wall:.1f}s < 60s)",
    )


def test_gate_04_two_pattern_embedding_identity_exact():
    t0 = time.monotonic()
    rng = stream(271828, 0)
    done = failures = 0
    while done < 200:
        n = int(rng.integers(2, 9))
        m = int(rng.integers(max(n, 2), 2 * n + 3))
        s = sample_uniform_outcome(m, n, rng)
        t = sample_uniform_outcome(m, n, rng)
        st_s, st_t = click_stats(s), click_stats(t)
        l = n - st_s.collisions - st_t.collisions
        if l < 1 or l < max(st_s.collisions, st_t.collisions):
            continue
        if st_s.singles < st_t.collisions or st_t.singles < st_s.collisions:
            continue
        x = rng.integers(0, 2, size=(l, l))
        if not verify_embedding_gbs_identity(build_embedding_gbs(x, s, t))[2]:
            failures += 1
        done += 1
    wall = time.monotonic() - t0
    _gate(
        failures == 0 and wall < 60.0,
        f"two-pattern embedding identity exact on 200 random triples, n<=8 "
        f"({failures} failures, {wall:.1f}s < 60s)",
    )


def test_gate_05_click_law_exact_and_tail_bound():
    # The click-law family is infinite (any m fits at n=1), so the exact sweep
    # is frozen to m<=30, n<=60 under the 1e5 state cap, plus three spot pairs
    # covering the long directions.
    t0 = time.monotonic()
    pairs = [
        (m, n)
        for m in range(2, 31)
        for n in range(1, 61)
        if dim_fock(m, n) <= 100_000
    ]
    pairs += [(2, 500), (3, 400), (1000, 1)]
    bad = 0
    for m, n in pairs:
        hist: dict[int, int] = {}
        for p in enumerate_outcomes(m, n):
            c = sum(1 for v in p.occupations if v)
            hist[c] = hist.get(c, 0) + 1
        for c in range(0, min(m, n) + 2):
            if hist.get(c, 0) != click_count(m, n, c):
                bad += 1
        if sum(hist.values()) != dim_fock(m, n):
            bad += 1
    res = click_concentration_check(42, 20, 0.25, trials=100_000, seed=3)
    se = math.sqrt(max(res.exact_tail * (1 - res.exact_tail), 1e-5) / 100_000)
    mc_ok = res.empirical <= res.bound + 4 * se and res.exact_tail <= res.bound
    wall = time.monotonic() - t0
    _gate(
        bad == 0 and mc_ok and wall < 120.0,
        f"click counts match exhaustive enumeration exactly on {len(pairs)} (m,n) pairs; "
        f"MC tail {res.empirical:.4f} <= bound {res.bound:.4f} + 4se at (42,20,0.25) "
        f"({wall:.1f}s < 120s)",
    )


def test_gate_06_truncation_tail_closed_form_and_gap_moment_quadrature():
    t0 = time.monotonic()
    tail_ok = True
    worst_z = 0.0
    for m in (4, 6, 8):
        rep = max_sv_tail_experiment(m, 1, [0.3, 0.1], 100_000, seed=11)
        for delta, emp, _se, _bound, _closed in rep.rows:
            closed = (2 * delta - delta * delta) ** (m - 1)
            se = math.sqrt(max(closed * (1 - closed), 1e-10) / 100_000)
            worst_z = max(worst_z, abs(emp - closed) / se)
            tail_ok &= abs(emp - closed) <= 4 * se
    # independent oracle: E (1 - sigma)^-2 at n=1, m=4 by direct quadrature
    quad, _ = integrate.quad(
        lambda v: (1.0 - math.sqrt(v)) ** -2 * 3.0 * (1.0 - v) ** 2, 0.0, 1.0
    )
    est = inverse_gap_moment_experiment(4, 1, 200_000, seed=7).summary["estimate"]
    rel = abs(est - quad) / quad
    wall = time.monotonic() - t0
    _gate(
        tail_ok and rel <= 0.05 and wall < 120.0,
        f"n=1 max-singular-value tail matches (2d-d^2)^(m-1) within 4se at m=4,6,8 "
        f"(worst z {worst_z:.2f}); gap moment {est:.3f} vs quadrature {quad:.3f} "
        f"(rel {rel:.3f} <= 0.05, {wall:.1f}s < 120s)",
    )


def test_gate_07_gap_moment_saturated_regime():
    t0 = time.monotonic()
    s = inverse_gap_moment_experiment(21, 10, 16_384, seed=2).summary
    finite = math.isfinite(s["estimate"])
    drift = abs(s["half_sample_estimate"] - s["estimate"]) / s["estimate"]
    wall = time.monotonic() - t0
    _gate(
        finite and drift <= 0.20 and s["estimate"] <= 1e30 and wall < 120.0,
        f"gap moment at (m=21, n=10) finite and stable "
        f"(estimate {s['estimate']:.3e} <= 1e30, half-sample drift {drift:.1%} <= 20%, "
        f"{wall:.1f}s < 120s)",
    )


def test_gate_08_sphere_mass_bounds():
    t0 = time.monotonic()
    flags = [
        "small_exact_within_upper",
        "cap_exact_above_lower",
        "small_within_upper",
        "cap_above_lower",
        "small_mc_consistent",
        "cap_mc_consistent",
    ]
    bad = []
    for dim, k, delta in [(6, 2, 0.1), (8, 3, 0.2), (12, 5, 0.3), (12, 1, 0.05)]:
        rep = sphere_lemma_experiments(dim, k, delta, 100_000, seed=7)
        bad += [f"({dim},{k},{delta}):{f}" for f in flags if not rep.summary[f]]
    wall = time.monotonic() - t0
    _gate(
        not bad and wall < 60.0,
        f"sphere prefix-mass upper bound and cap lower bound hold with exact Beta "
        f"oracles and 4se MC agreement on 4 configs, dim<=12 ({wall:.1f}s < 60s)"
        + (f" [violations: {bad}]" if bad else ""),
    )


def test_gate_09_path_degree_and_smuggle_recovery():
    t0 = time.monotonic()
    worst = 0.0
    for n in range(2, 7):
        m = 2 * n
        rng = stream(100 + n, 0)
        pattern = tuple([1] * n) + (0,) * (m - n)
        x = rng.integers(0, 2, size=(n, n))
        if per_exact_int(x) == 0:
            x[0, 0] = 1 - x[0, 0]
        spec = make_smuggle_path(haar_unitary(m, 100 + n), x, pattern)
        degree = 2 * n
        delta = 1.0 / (4.0 * n * n)
        t = sample_grid(degree, delta, degree + 1)
        y = np.array([path_value(spec, ti) for ti in t])
        fit = fit_and_extrapolate(PolySamplePath(degree, delta, t, y))
        for th in stream(200 + n, 0).uniform(0.0, delta, 10):
            want = path_value(spec, th)
            got = cheb.chebval(2.0 * th / delta - 1.0, fit.coefficients)
            worst = max(worst, abs(got - want) / max(abs(want), 1e-30))
    s = end_to_end_smuggle_demo(3, 6, seed=5).summary
    rel = s["rel_error_precise"]
    wall = time.monotonic() - t0
    _gate(
        worst <= 1e-7 and s["rounding_recovered"] and rel <= 1e-6 and wall < 120.0,
        f"path values fit a degree-2n polynomial (worst held-out rel err {worst:.1e} "
        f"<= 1e-7, n=2..6); noiseless n=3 demo recovers the squared permanent "
        f"(rel err {rel:.1e} <= 1e-6, integer rounding exact, {wall:.1f}s < 120s)",
    )


def test_gate_10_extrapolation_blowup_and_trimming():
    t0 = time.monotonic()
    rep = blowup_scaling_experiment([2, 4, 6], [0.5, 0.25, 0.1], seed=0, epsilon=1e-6)
    scaling_ok = bool(rep.summary["all_within_factor3"])
    # trimmed fit vs clean fit on the same noisy instance, 20% nodes corrupted
    d, delta, noise = 6, 0.1, 1e-6
    t = sample_grid(d, delta)
    worst_ratio = 0.0
    caught_all = True
    for seed in range(5):
        rng = stream(seed, 0)
        coef = rng.standard_normal(d + 1)
        y = cheb.chebval(2.0 * t / delta - 1.0, coef) + rng.uniform(-noise, noise, len(t))
        truth = float(cheb.chebval(2.0 / delta - 1.0, coef))
        err_clean = abs(fit_and_extrapolate(PolySamplePath(d, delta, t, y)).estimate - truth)
        y_bad = y.copy()
        idx = rng.choice(len(t), size=int(0.20 * len(t)), replace=False)
        y_bad[idx] += np.where(rng.random(len(idx)) < 0.5, -1.0, 1.0)
        fit = fit_and_extrapolate(PolySamplePath(d, delta, t, y_bad), eta=0.22)
        caught_all &= bool(np.isin(idx, fit.discarded).all())
        worst_ratio = max(worst_ratio, abs(fit.estimate - truth) / err_clean)
    wall = time.monotonic() - t0
    _gate(
        scaling_ok and caught_all and worst_ratio <= 10.0 and wall < 60.0,
        f"noise amplification within factor 3 of (1/D)^d over d=2,4,6 x D=0.5,0.25,0.1; "
        f"trimmed fit discards all corrupted nodes at 20% corruption with "
        f"{worst_ratio:.1f}x <= 10x degradation ({wall:.1f}s < 60s)",
    )


def test_gate_11_gbs_normalization_and_photon_mean():
    t0 = time.monotonic()
    s = gbs_normalization_experiment(3, 2, 10, seed=2).summary
    norm_ok = s["max_postselected_deviation"] <= 1e-8
    worst = 0.0
    for m, r in [(3, 0.65), (5, 0.8), (8, 0.3)]:
        series = sum(k * photon_number_pmf(m, r, k) for k in range(400))
        closed = m * math.sinh(r) ** 2
        worst = max(worst, abs(series - closed) / closed)
    wall = time.monotonic() - t0
    _gate(
        norm_ok and worst <= 1e-10 and wall < 60.0,
        f"two-pattern probabilities normalize over 10 Haar draws at (3,2) "
        f"(max dev {s['max_postselected_deviation']:.1e} <= 1e-8); photon-number mean "
        f"matches m sinh^2 r (rel dev {worst:.1e} <= 1e-10, {wall:.1f}s < 60s)",
    )


def test_gate_12_anticoncentration_band():
    # Calibrated at first release, seed 20260814: medians spanned
    # [-0.893, -0.525] and no sample fell below the -10 line. Regression band
    # below leaves ~0.3 cushion on both sides.
    t0 = time.monotonic()
    rep = anticoncentration_experiment(
        list(range(4, 17)), alpha=2.0, units=20, outcomes_per_unit=20, seed=20260814
    )
    band_lo, band_hi = -1.25, -0.20
    out_of_band = []
    tail_bad = []
    for n in range(4, 17):
        med = rep.summary[str(n)]["box_shifted"]["median"]
        if not band_lo <= med <= band_hi:
            out_of_band.append((n, med))
        shifted = np.array([r[5] + r[6] for r in rep.rows if r[0] == n])
        if float(np.mean(shifted < -10.0)) >= 0.05:
            tail_bad.append(n)
    wall = time.monotonic() - t0
    _gate(
        not out_of_band and not tail_bad and wall < 600.0,
        f"shifted log-probability medians stay inside [{band_lo}, {band_hi}] for "
        f"n=4..16 at 20x20 samples and <5% of samples fall below -10 "
        f"({wall:.1f}s < 600s)"
        + (f" [medians out: {out_of_band}]" if out_of_band else "")
        + (f" [heavy tails at n={tail_bad}]" if tail_bad else ""),
    )


if __name__ == "__main__":
    for name, fn in sorted(globals().items()):
        if name.startswith("test_gate_"):
            fn()
