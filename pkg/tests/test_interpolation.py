"""Matrix paths, polynomial fits, extrapolation blowup, and the smuggle demo."""

import math

import numpy as np
import pytest
from numpy.polynomial import chebyshev as cheb

from bosonlab.errors import CapacityError, ContractViolation
from bosonlab.interpolation import (
    PolySamplePath,
    SmugglePathSpec,
    blowup_scaling_experiment,
    end_to_end_smuggle_demo,
    fit_and_extrapolate,
    make_smuggle_path,
    path_value,
    path_value_precise,
    sample_grid,
)
from bosonlab.permanent import per_exact, per_exact_int
from bosonlab.randmat import haar_unitary
from bosonlab.rng import stream


def demo_path(n=3, m=6, seed=4):
    rng = stream(seed, 0)
    pattern = (2, 1) if n == 3 else tuple([1] * n)
    pattern = pattern + (0,) * (m - len(pattern))
    clicks = sum(1 for v in pattern if v > 0)
    x = rng.integers(0, 2, size=(clicks, clicks))
    if per_exact_int(x) == 0:
        x[0, 0] = 1 - x[0, 0]
    return make_smuggle_path(haar_unitary(m, seed), x, pattern)


def test_path_endpoints():
    spec = demo_path()
    b0 = spec.b0
    at_zero = abs(per_exact(b0)) ** 2
    assert np.isclose(path_value(spec, 0.0), at_zero, rtol=1e-12)
    truth = per_exact_int(spec.a) ** 2
    assert np.isclose(path_value(spec, 1.0), truth, rtol=1e-9)


def test_path_scaling_contract():
    # sqrt(m) scaling: rebuilding without scale_rows divides b0 by sqrt(m)
    m = 6
    u = haar_unitary(m, seed=4)
    x = np.ones((1, 1), dtype=int)
    s = (3, 0, 0, 0, 0, 0)
    scaled = make_smuggle_path(u, x, s)
    plain = make_smuggle_path(u, x, s, scale_rows=False)
    assert np.allclose(scaled.b0, math.sqrt(m) * plain.b0)


def test_path_repeated_row_blocks():
    spec = demo_path()  # pattern (2,1,...) repeats the first row twice
    assert np.array_equal(spec.b0[0], spec.b0[1])
    assert np.array_equal(spec.a[0], spec.a[1])
    bt = (1 - 0.37) * spec.b0 + 0.37 * spec.a
    assert np.array_equal(bt[0], bt[1])


def test_path_spec_rejects_mismatched_blocks():
    spec = demo_path()
    broken = spec.b0.copy()
    broken[1] += 1.0  # break the repeated block
    with pytest.raises(ContractViolation):
        SmugglePathSpec(b0=broken, a=spec.a, pattern=spec.pattern)


def test_path_value_is_low_degree_polynomial():
    # degree <= 2n: a fit at 2n+1 nodes must predict held-out nodes exactly
    spec = demo_path()
    n = spec.pattern.n
    degree = 2 * n
    delta = 1.0 / (4.0 * n * n)
    t = sample_grid(degree, delta, degree + 1)
    y = np.array([path_value(spec, ti) for ti in t])
    fit = fit_and_extrapolate(PolySamplePath(degree, delta, t, y))
    rng = stream(8, 0)
    held = rng.uniform(0.0, delta, 10)
    for th in held:
        want = path_value(spec, th)
        got = cheb.chebval(2.0 * th / delta - 1.0, fit.coefficients)
        assert abs(got - want) <= 1e-7 * max(abs(want), 1e-30)


def test_path_value_precise_matches_double():
    spec = demo_path()
    for t in (0.0, 0.01, 0.04):
        a = path_value(spec, t)
        b = float(path_value_precise(spec, t, dps=50))
        assert np.isclose(a, b, rtol=1e-10)


def test_sample_grid_defaults():
    t = sample_grid(3, 0.25)
    assert len(t) == 900
    assert t[0] == 0.0 and t[-1] == 0.25
    steps = np.diff(t)
    assert np.allclose(steps, steps[0])
    with pytest.raises(ContractViolation):
        sample_grid(2, 0.5, count=2)


def test_poly_sample_path_validation():
    t = np.linspace(0, 0.5, 10)
    y = np.zeros(10)
    PolySamplePath(2, 0.5, t, y)
    with pytest.raises(ContractViolation):
        PolySamplePath(12, 0.5, t, y)  # too few nodes
    bad = t.copy()
    bad[4] += 0.01
    with pytest.raises(ContractViolation, match="degenerate node spacing"):
        PolySamplePath(2, 0.5, bad, y)
    with pytest.raises(ContractViolation):
        PolySamplePath(2, 0.3, t, y)  # nodes beyond delta
    with pytest.raises(ContractViolation):
        PolySamplePath(2, 0.5, t[::-1], y)


def test_fit_recovers_synthetic_polynomial():
    rng = stream(9, 0)
    d, delta = 4, 0.2
    t = sample_grid(d, delta)
    coef = rng.standard_normal(d + 1)
    x = 2.0 * t / delta - 1.0
    y = cheb.chebval(x, coef)
    truth = cheb.chebval(2.0 / delta - 1.0, coef)
    fit = fit_and_extrapolate(PolySamplePath(d, delta, t, y))
    assert abs(fit.estimate - truth) <= 1e-9 * abs(truth)
    assert fit.n_used == len(t)
    assert fit.discarded == []


def test_fit_matches_lagrange_on_clean_data():
    # least squares on exact polynomial data = interpolation = Lagrange form
    d, delta = 3, 0.5
    t = sample_grid(d, delta, d + 1)
    rng = stream(10, 0)
    coef = rng.standard_normal(d + 1)
    y = cheb.chebval(2.0 * t / delta - 1.0, coef)
    fit = fit_and_extrapolate(PolySamplePath(d, delta, t, y))
    lagrange = 0.0
    for i in range(len(t)):
        w = 1.0
        for j in range(len(t)):
            if j != i:
                w *= (1.0 - t[j]) / (t[i] - t[j])
        lagrange += y[i] * w
    assert abs(fit.estimate - lagrange) <= 1e-9 * max(abs(lagrange), 1.0)


def test_trimmed_fit_rejects_corruption():
    rng = stream(11, 0)
    d, delta = 4, 0.25
    t = sample_grid(d, delta)
    coef = rng.standard_normal(d + 1)
    y = cheb.chebval(2.0 * t / delta - 1.0, coef)
    truth = cheb.chebval(2.0 / delta - 1.0, coef)
    corrupt = rng.choice(len(t), size=int(0.15 * len(t)), replace=False)
    y_bad = y.copy()
    y_bad[corrupt] += rng.uniform(5.0, 50.0, len(corrupt))
    fit = fit_and_extrapolate(PolySamplePath(d, delta, t, y_bad), eta=0.2)
    assert set(corrupt).issubset(set(fit.discarded))
    assert abs(fit.estimate - truth) <= 1e-6 * max(abs(truth), 1.0)


def test_fit_eta_contract():
    t = np.linspace(0, 0.5, 20)
    path = PolySamplePath(2, 0.5, t, np.zeros(20))
    with pytest.raises(ContractViolation):
        fit_and_extrapolate(path, eta=0.25)
    with pytest.raises(ContractViolation):
        fit_and_extrapolate(path, eta=-0.1)


def test_blowup_experiment_tracks_power_law():
    rep = blowup_scaling_experiment([2, 4, 6], [0.5, 0.1], seed=1)
    assert rep.summary["all_within_factor3"] is True
    for row in rep.rows:
        d, delta, nodes, amp_c, ratio, amp_r, implied_c = row
        assert nodes == 100 * d * d
        assert 1 / 3 <= ratio <= 3
        assert implied_c <= 3.0
    for delta_key, slope in rep.summary["slopes"].items():
        want = slope["log_inv_delta"]
        assert abs(slope["log_amp_per_degree"] - want) <= 0.25 * want + 0.05


def test_blowup_interpolation_regime_is_tame():
    # delta = 1 means no extrapolation at all: amplification ~ 1
    rep = blowup_scaling_experiment([1], [1.0], seed=3)
    amp = rep.rows[0][3]
    assert 0.8 <= amp <= 1.2


def test_smuggle_demo_noiseless_recovers_integer():
    rep = end_to_end_smuggle_demo(2, 4, seed=1)
    s = rep.summary
    assert s["rounding_recovered"] is True
    assert s["rel_error_precise"] <= 1e-6
    factor = math.prod(math.factorial(v) for v in rep.config["pattern"])
    assert s["truth"] == (per_exact_int(np.array(rep.config["x"])) * factor) ** 2
    assert len(rep.rows) == s["nodes"]


def test_smuggle_demo_noisy_envelope():
    rep = end_to_end_smuggle_demo(2, 4, seed=2, noise_scale=1e-9)
    s = rep.summary
    assert s["within_envelope"] is True
    assert "estimate_precise" not in s
    assert s["error_envelope"] == pytest.approx(
        1e-9 * (1.0 / s["delta"]) ** s["degree"] * math.exp(3.0 * s["degree"])
    )


def test_smuggle_demo_b0_entry_scale():
    # scaled truncation entries have unit mean square
    specs = [demo_path(n=4, m=8, seed=s) for s in range(12)]
    sq = np.concatenate([np.abs(sp.b0) ** 2 for sp in specs]).ravel()
    assert abs(sq.mean() - 1.0) < 0.3


def test_smuggle_demo_caps():
    with pytest.raises(CapacityError):
        end_to_end_smuggle_demo(7, 14, seed=0)
    with pytest.raises(ContractViolation):
        end_to_end_smuggle_demo(0, 4, seed=0)
    with pytest.raises(ContractViolation):
        end_to_end_smuggle_demo(3, 2, seed=0)
