"""Haar draws, truncation statistics, and the sphere/tail experiments."""

import math

import numpy as np
import pytest
from scipy import integrate, stats

from bosonlab.errors import ContractViolation, DomainError
from bosonlab.randmat import (
    cap_fraction_exact,
    haar_batch,
    haar_unitary,
    inverse_gap_moment_experiment,
    log_density_unnormalized,
    max_sv_tail_experiment,
    scaled_truncation,
    singular_spectrum,
    small_prefix_mass_exact,
    sphere_lemma_experiments,
    submatrix_with_repetitions,
    truncation,
)


def test_unitarity():
    for m in (1, 2, 3, 5, 8):
        u = haar_unitary(m, seed=3).matrix
        assert np.allclose(u @ u.conj().T, np.eye(m), atol=1e-12)


def test_reproducibility_and_stream_independence():
    a = haar_unitary(5, seed=7, stream_id=2).matrix
    b = haar_unitary(5, seed=7, stream_id=2).matrix
    c = haar_unitary(5, seed=7, stream_id=3).matrix
    assert np.array_equal(a, b)
    assert not np.allclose(a, c)


def test_batch_is_unitary_and_distinct():
    batch = haar_batch(4, 6, seed=1)
    assert batch.shape == (6, 4, 4)
    for u in batch:
        assert np.allclose(u @ u.conj().T, np.eye(4), atol=1e-12)
    assert not np.allclose(batch[0], batch[1])


def test_first_entry_law_is_beta():
    # |U_11|^2 ~ Beta(1, m-1): the first column is uniform on the complex sphere
    m, draws = 4, 100_000
    batch = haar_batch(m, draws, seed=42)
    x = np.abs(batch[:, 0, 0]) ** 2
    res = stats.kstest(x, stats.beta(1, m - 1).cdf)
    assert res.pvalue > 1e-3


def test_truncation_blocks():
    u = haar_unitary(6, seed=9)
    z = truncation(u, 3)
    assert np.array_equal(z, u.matrix[:3, :3])
    assert np.allclose(scaled_truncation(u, 3), math.sqrt(6) * z)
    with pytest.raises(ContractViolation):
        truncation(u, 7)


def test_truncation_singular_values_at_most_one():
    for seed in range(20):
        z = truncation(haar_unitary(7, seed=seed), 3)
        assert singular_spectrum(z)[0] <= 1 + 1e-10


def test_submatrix_row_repetition():
    u = haar_unitary(3, seed=2)
    got = submatrix_with_repetitions(u, (2, 0, 1))
    cols = u.matrix[:, :3]
    want = np.stack([cols[0], cols[0], cols[2]])
    assert np.array_equal(got, want)
    assert np.linalg.matrix_rank(got) <= 2  # rank <= number of clicks
    with pytest.raises(ContractViolation):
        submatrix_with_repetitions(u, (2, 0))  # mode count mismatch


def test_log_density_rotation_invariance():
    m, n = 9, 3
    z = scaled_truncation(haar_unitary(m, seed=5), n)
    base = log_density_unnormalized(z, m)
    v = haar_unitary(n, seed=6).matrix
    w = haar_unitary(n, seed=7).matrix
    assert np.isclose(log_density_unnormalized(v @ z @ w, m), base, rtol=1e-9)
    assert math.isfinite(base)


def test_log_density_domain_and_support():
    with pytest.raises(DomainError):
        log_density_unnormalized(np.eye(3), 6)  # needs m > 2n
    off = math.sqrt(7) * np.eye(3)  # sigma^2 = m sits on the support edge
    assert log_density_unnormalized(off, 7) == float("-inf")


def test_max_sv_tail_n1_closed_form():
    # exact law at n=1: P(sigma >= 1-d) = (2d - d^2)^(m-1)
    m, trials = 6, 100_000
    rep = max_sv_tail_experiment(m, 1, [0.3, 0.1], trials, seed=17)
    for delta, emp, se, bound, closed in rep.rows:
        want = (2 * delta - delta**2) ** (m - 1)
        assert np.isclose(closed, want, rtol=1e-12)
        assert abs(emp - want) <= 4 * max(se, 1e-5)
        assert emp <= bound + 4 * se
    assert rep.summary["all_within_bound"] is True


def test_max_sv_tail_monotone_in_delta():
    rep = max_sv_tail_experiment(6, 2, [0.4, 0.3, 0.2, 0.1], 20_000, seed=3)
    emps = [row[1] for row in rep.rows]
    assert emps == sorted(emps, reverse=True)


def test_max_sv_tail_delta_contract():
    with pytest.raises(ContractViolation):
        max_sv_tail_experiment(6, 2, [0.6], 100, seed=0)


def test_inverse_gap_moment_quadrature_oracle():
    # n=1, m=4: sigma^2 ~ Beta(1, 3), E (1-sigma)^-2 = 8.5 by quadrature
    def integrand(x):
        return (1 - math.sqrt(x)) ** -2 * 3 * (1 - x) ** 2

    oracle, _ = integrate.quad(integrand, 0, 1)
    assert np.isclose(oracle, 8.5, rtol=1e-9)
    rep = inverse_gap_moment_experiment(4, 1, 100_000, seed=0)
    assert abs(rep.summary["estimate"] - oracle) / oracle < 0.05
    assert rep.summary["regime_ok"] is True


def test_inverse_gap_moment_domain():
    with pytest.raises(DomainError):
        inverse_gap_moment_experiment(6, 3, 100, seed=0)


def test_sphere_small_prefix_exact_closed_forms():
    # R^3, k=1: x_1 is uniform on [-1,1] (Archimedes), so P(|x_1|<=d) = d
    for d in (0.2, 0.5, 0.9):
        assert np.isclose(small_prefix_mass_exact(3, 1, d), d, rtol=1e-12)
    # R^6, k=2: squared prefix ~ Beta(1,2), P = 1 - (1-d^2)^2
    for d in (0.1, 0.4):
        assert np.isclose(small_prefix_mass_exact(6, 2, d), 1 - (1 - d * d) ** 2, rtol=1e-12)
    # k = n_dim: the full norm is 1
    assert small_prefix_mass_exact(5, 5, 0.99) == 0.0
    assert small_prefix_mass_exact(5, 5, 1.0) == 1.0


def test_sphere_cap_exact_closed_form():
    # R^3 cap fraction within distance d of a pole is d^2/4 (Archimedes again)
    for d in (0.3, 0.7, 1.0):
        assert np.isclose(cap_fraction_exact(3, d), d * d / 4, rtol=1e-12)


def test_sphere_lemma_experiment_bounds_and_consistency():
    rep = sphere_lemma_experiments(6, 2, 0.1, 100_000, seed=7)
    s = rep.summary
    assert s["small_exact_within_upper"] is True
    assert s["cap_exact_above_lower"] is True
    assert s["small_within_upper"] is True
    assert s["cap_above_lower"] is True
    assert s["small_mc_consistent"] is True
    assert s["cap_mc_consistent"] is True
    assert np.isclose(s["small_bound"], 0.08, rtol=1e-12)
    assert np.isclose(s["small_exact"], 0.0199, rtol=1e-12)
    assert rep.columns == ["quantity", "empirical", "exact", "stderr", "bound", "bound_kind"]


def test_sphere_full_prefix_edge():
    rep = sphere_lemma_experiments(5, 5, 0.9, 2_000, seed=1)
    assert rep.summary["small_empirical"] == 0.0
    assert rep.summary["small_exact"] == 0.0


def test_sphere_contracts():
    with pytest.raises(ContractViolation):
        sphere_lemma_experiments(1, 1, 0.5, 10, seed=0)
    with pytest.raises(ContractViolation):
        sphere_lemma_experiments(4, 5, 0.5, 10, seed=0)
    with pytest.raises(ContractViolation):
        sphere_lemma_experiments(4, 2, 1.5, 10, seed=0)
