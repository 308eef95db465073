"""Haar-random unitaries, truncations, and their singular-value statistics.

A Haar unitary is drawn as a complex Ginibre matrix followed by QR with
the R-diagonal phase fix, which makes the distribution exactly invariant.
The "truncation" is the top-left n x n block Z of an m x m draw; the
"scaled truncation" is sqrt(m) * Z, whose entries have unit mean square.

For m > 2n the scaled truncation has an absolutely continuous law with
unnormalized log-density sum_i (m - 2n) * log(1 - sigma_i^2 / m) on
sigma_i^2 <= m (singular values sigma_i of the scaled block).

Experiments here check two tail facts used downstream:
  - P(sigma_max(Z) >= 1 - delta) <= 2^(5m+n+1) * delta^(2m-4n), with the
    exact n = 1 law (2*delta - delta^2)^(m-1) as cross-check;
  - E (1 - sigma_max(Z))^(-2) <= 10^(3/eps) when m = ceil((2+eps) n).
Plus uniform-sphere coordinate/cap bounds backing the density arguments.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import stats

from .errors import ContractViolation, DomainError
from .fock import as_pattern
from .report import ExperimentReport
from .rng import TRIAL_BLOCK, stream

__all__ = [
    "HaarDraw",
    "haar_unitary",
    "haar_batch",
    "truncation",
    "scaled_truncation",
    "submatrix_with_repetitions",
    "singular_spectrum",
    "log_density_unnormalized",
    "max_sv_tail_experiment",
    "inverse_gap_moment_experiment",
    "small_prefix_mass_exact",
    "cap_fraction_exact",
    "sphere_lemma_experiments",
]


@dataclass(frozen=True)
class HaarDraw:
    """A Haar-random unitary plus the provenance needed to redraw it."""

    matrix: np.ndarray
    m: int
    seed: int
    stream_id: int


def _haar_from_rng(m: int, count: int, rng: np.random.Generator) -> np.ndarray:
    z = (rng.standard_normal((count, m, m)) + 1j * rng.standard_normal((count, m, m)))
    z /= math.sqrt(2.0)
    q, r = np.linalg.qr(z)
    d = np.einsum("...ii->...i", r)
    ph = np.where(np.abs(d) > 0, d / np.where(np.abs(d) > 0, np.abs(d), 1.0), 1.0)
    return q * ph[:, None, :]


def haar_unitary(m: int, seed: int, stream_id: int = 0) -> HaarDraw:
    """Draw one m x m Haar unitary; identical (seed, stream_id) reproduce it bit-exactly."""
    if m < 1:
        raise ContractViolation(f"need m >= 1, got {m}")
    u = _haar_from_rng(m, 1, stream(seed, stream_id))[0]
    return HaarDraw(matrix=u, m=m, seed=seed, stream_id=stream_id)


def haar_batch(m: int, count: int, seed: int, stream_id: int = 0) -> np.ndarray:
    """Stack of `count` independent Haar unitaries from one stream, shape (count, m, m)."""
    if m < 1 or count < 1:
        raise ContractViolation("need m >= 1 and count >= 1")
    return _haar_from_rng(m, count, stream(seed, stream_id))


def _matrix_of(u) -> np.ndarray:
    if isinstance(u, HaarDraw):
        return u.matrix
    arr = np.asarray(u)
    if arr.ndim != 2:
        raise ContractViolation(f"expected a matrix, got ndim {arr.ndim}")
    return arr


def truncation(u, n: int) -> np.ndarray:
    """Top-left n x n block of the unitary."""
    mat = _matrix_of(u)
    m = mat.shape[0]
    if not 1 <= n <= m:
        raise ContractViolation(f"need 1 <= n <= m = {m}, got n = {n}")
    return np.array(mat[:n, :n])


def scaled_truncation(u, n: int) -> np.ndarray:
    """sqrt(m) times the top-left n x n block; entries have unit mean square."""
    mat = _matrix_of(u)
    return math.sqrt(mat.shape[0]) * truncation(mat, n)


def submatrix_with_repetitions(u, s) -> np.ndarray:
    """n x n block for pattern s: row i of the first n columns, repeated s_i times.

    Rows keep ascending mode order; modes with s_i = 0 drop out.
    """
    mat = _matrix_of(u)
    pat = as_pattern(s)
    m = mat.shape[0]
    if pat.m != m:
        raise ContractViolation(f"pattern has {pat.m} modes, matrix has {m}")
    n = pat.n
    if n < 1:
        raise ContractViolation("pattern must place at least one photon")
    if n > mat.shape[1]:
        raise ContractViolation(f"pattern places {n} photons but the matrix has {mat.shape[1]} columns")
    return np.repeat(mat[:, :n], pat.occupations, axis=0)


def singular_spectrum(mat) -> np.ndarray:
    """Singular values, non-increasing."""
    arr = np.asarray(mat)
    if arr.ndim != 2:
        raise ContractViolation(f"expected a matrix, got ndim {arr.ndim}")
    return np.linalg.svd(arr, compute_uv=False)


def log_density_unnormalized(b_scaled, m: int) -> float:
    """Log of the unnormalized scaled-truncation density at the n x n matrix.

    Valid for m > 2n. Returns -inf outside the support (any sigma_i^2 > m).
    """
    arr = np.asarray(b_scaled)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise ContractViolation(f"expected a square matrix, got shape {arr.shape}")
    n = arr.shape[0]
    if m <= 2 * n:
        raise DomainError(f"density requires m > 2n, got m={m}, n={n}")
    s2 = singular_spectrum(arr) ** 2
    if np.any(s2 >= m):
        return float("-inf")
    return float((m - 2 * n) * np.sum(np.log1p(-s2 / m)))


# ----------------------------------------------------------------------
# experiments
# ----------------------------------------------------------------------

def _sigma_max_samples(m: int, n: int, trials: int, seed: int) -> np.ndarray:
    out = np.empty(trials)
    done = 0
    block_id = 0
    while done < trials:
        count = min(TRIAL_BLOCK, trials - done)
        batch = _haar_from_rng(m, count, stream(seed, block_id))
        sv = np.linalg.svd(batch[:, :n, :n], compute_uv=False)
        out[done : done + count] = sv[:, 0]
        done += count
        block_id += 1
    return out


def max_sv_tail_experiment(m: int, n: int, deltas, trials: int, seed: int) -> ExperimentReport:
    """P(sigma_max of the n x n truncation >= 1 - delta) vs. the exponential bound.

    Per delta: Monte Carlo frequency with its standard error, the bound
    min(1, 2^(5m+n+1) * delta^(2m-4n)), and for n = 1 the exact law
    (2*delta - delta^2)^(m-1).
    """
    deltas = [float(d) for d in deltas]
    if any(not 0 < d < 0.5 for d in deltas):
        raise ContractViolation("deltas must lie in (0, 0.5)")
    if not 1 <= n <= m:
        raise ContractViolation(f"need 1 <= n <= m, got n={n}, m={m}")
    sig = _sigma_max_samples(m, n, trials, seed)
    report = ExperimentReport(
        name="svtail",
        description="tail of the largest singular value of a Haar-unitary truncation vs. exponential bound",
        config={"m": m, "n": n, "deltas": deltas, "trials": trials, "seed": seed, "block": TRIAL_BLOCK},
        columns=["delta", "empirical", "stderr", "bound", "closed_form_n1"],
    )
    all_within = True
    for d in deltas:
        emp = float(np.mean(sig >= 1.0 - d))
        se = math.sqrt(max(emp * (1 - emp), 1e-12) / trials)
        log2_bound = (5 * m + n + 1) + (2 * m - 4 * n) * math.log2(d)
        bound = min(1.0, 2.0 ** log2_bound)
        closed = (2 * d - d * d) ** (m - 1) if n == 1 else None
        all_within = all_within and emp <= bound + 4 * se
        report.add_row(d, emp, se, bound, closed)
    report.summary = {
        "sigma_max_mean": float(np.mean(sig)),
        "sigma_max_max": float(np.max(sig)),
        "all_within_bound": bool(all_within),
    }
    return report


def inverse_gap_moment_experiment(m: int, n: int, trials: int, seed: int) -> ExperimentReport:
    """Monte Carlo E (1 - sigma_max)^(-2) for the n x n truncation, vs. 10^(3/eps).

    eps is inferred from m = ceil((2+eps) n). The comparison bound assumes
    n >= 2/eps; outside that regime the estimate is still computed and a
    warning flag is set (the moment may be barely divergent there, so the
    estimate is a pinned-seed diagnostic, not a convergent integral).
    Stability diagnostics: half-sample drift and largest single-trial share.
    """
    if m <= 2 * n:
        raise DomainError(f"requires m > 2n, got m={m}, n={n}")
    if trials < 2:
        raise ContractViolation("trials must be >= 2")
    sig = _sigma_max_samples(m, n, trials, seed)
    x = (1.0 - sig) ** -2.0
    eps = (m - 2 * n) / n
    bound = 10.0 ** (3.0 / eps)
    estimate = float(np.mean(x))
    half = float(np.mean(x[: trials // 2]))
    report = ExperimentReport(
        name="invgap",
        description="Monte Carlo second inverse moment of the spectral gap 1 - sigma_max of a truncation",
        config={"m": m, "n": n, "trials": trials, "seed": seed, "block": TRIAL_BLOCK},
        columns=["block_index", "block_mean", "block_max"],
    )
    done = 0
    block_id = 0
    while done < trials:
        count = min(TRIAL_BLOCK, trials - done)
        chunk = x[done : done + count]
        report.add_row(block_id, float(np.mean(chunk)), float(np.max(chunk)))
        done += count
        block_id += 1
    report.summary = {
        "estimate": estimate,
        "half_sample_estimate": half,
        "half_sample_drift": abs(estimate - half) / estimate,
        "max_term_share": float(np.max(x) / np.sum(x)),
        "epsilon": eps,
        "bound": bound,
        "within_bound": bool(estimate <= bound),
        "regime_ok": bool(n >= 2.0 / eps),
    }
    return report


def _ball_volume(dim: int) -> float:
    # unit-ball volume in R^dim
    return math.exp((dim / 2.0) * math.log(math.pi) - math.lgamma(dim / 2.0 + 1.0))


def _sphere_area(dim: int) -> float:
    # surface area of the unit sphere S^(dim-1) in R^dim
    return math.exp(math.log(2.0) + (dim / 2.0) * math.log(math.pi) - math.lgamma(dim / 2.0))


def small_prefix_mass_exact(n_dim: int, k: int, delta: float) -> float:
    """Exact P(x_1^2 + ... + x_k^2 <= delta^2) for x uniform on the sphere in R^n_dim.

    The squared prefix norm follows Beta(k/2, (n_dim - k)/2); k = n_dim is
    degenerate (the full norm is 1, so the mass is 0 for delta < 1).
    """
    if not 1 <= k <= n_dim:
        raise ContractViolation(f"need 1 <= k <= n_dim, got k={k}")
    if k == n_dim:
        return 1.0 if delta >= 1.0 else 0.0
    return float(stats.beta.cdf(delta * delta, k / 2.0, (n_dim - k) / 2.0))


def cap_fraction_exact(n_dim: int, delta: float) -> float:
    """Exact fraction of the unit sphere in R^n_dim within distance delta of a point.

    Membership is x_1 >= 1 - delta^2/2, and (x_1 + 1)/2 follows the symmetric
    Beta((n_dim-1)/2, (n_dim-1)/2).
    """
    a = (n_dim - 1) / 2.0
    threshold = 1.0 - delta * delta / 2.0
    return float(stats.beta.sf((threshold + 1.0) / 2.0, a, a))


def sphere_lemma_experiments(n_dim: int, k: int, delta: float, trials: int, seed: int) -> ExperimentReport:
    """Uniform-sphere prefix-norm mass and cap volume vs. their analytic bounds.

    For x uniform on the real unit sphere in R^n_dim:
      - P(x_1^2 + ... + x_k^2 <= delta^2) <= 2^(n_dim/2) * delta^k, i.e. the
        first k coordinates have norm <= delta (k = n_dim and delta < 1 gives
        probability exactly 0);
      - the fraction of the sphere within distance delta of a fixed point
        is at least ball_vol(n_dim - 1) * 2^(-(n_dim+1)/2) * delta^(n_dim-1)
        divided by the sphere area.
    Both probabilities have exact Beta-law values; the report carries the
    exact value, the Monte Carlo estimate, and the bound for each, and the
    summary checks bound-vs-exact (deterministic) and MC-vs-exact (4 sigma).
    """
    if n_dim < 2:
        raise ContractViolation(f"need n_dim >= 2, got {n_dim}")
    if not 1 <= k <= n_dim:
        raise ContractViolation(f"need 1 <= k <= n_dim, got k={k}")
    if not 0 < delta <= 1:
        raise ContractViolation(f"need 0 < delta <= 1, got {delta}")
    small_hits = 0
    cap_hits = 0
    # within distance delta of the pole e_1 <=> x_1 >= 1 - delta^2/2
    cap_threshold = 1.0 - delta * delta / 2.0
    small_threshold = delta * delta
    done = 0
    block_id = 0
    while done < trials:
        count = min(TRIAL_BLOCK, trials - done)
        g = stream(seed, block_id).standard_normal((count, n_dim))
        g /= np.linalg.norm(g, axis=1, keepdims=True)
        small_hits += int(np.sum(np.sum(g[:, :k] ** 2, axis=1) <= small_threshold))
        cap_hits += int(np.sum(g[:, 0] >= cap_threshold))
        done += count
        block_id += 1
    small_emp = small_hits / trials
    cap_emp = cap_hits / trials
    small_exact = small_prefix_mass_exact(n_dim, k, delta)
    cap_exact = cap_fraction_exact(n_dim, delta)
    small_bound = min(1.0, 2.0 ** (n_dim / 2.0) * delta ** k)
    cap_lower = _ball_volume(n_dim - 1) * 2.0 ** (-(n_dim + 1) / 2.0) * delta ** (n_dim - 1) / _sphere_area(n_dim)
    report = ExperimentReport(
        name="sphere",
        description="uniform-sphere prefix-norm mass upper bound and spherical-cap volume lower bound",
        config={"n_dim": n_dim, "k": k, "delta": delta, "trials": trials, "seed": seed, "block": TRIAL_BLOCK},
        columns=["quantity", "empirical", "exact", "stderr", "bound", "bound_kind"],
    )
    # binomial SE at the exact rate, so zero-hit runs stay a meaningful check
    small_se = math.sqrt(max(small_exact * (1 - small_exact), 1.0 / trials) / trials)
    cap_se = math.sqrt(max(cap_exact * (1 - cap_exact), 1.0 / trials) / trials)
    report.add_row("small_prefix_mass", small_emp, small_exact, small_se, small_bound, "upper")
    report.add_row("cap_fraction", cap_emp, cap_exact, cap_se, cap_lower, "lower")
    report.summary = {
        "small_exact_within_upper": bool(small_exact <= small_bound),
        "cap_exact_above_lower": bool(cap_exact >= cap_lower),
        "small_within_upper": bool(small_emp <= small_bound + 4 * small_se),
        "cap_above_lower": bool(cap_emp >= cap_lower - 4 * cap_se),
        "small_mc_consistent": bool(abs(small_emp - small_exact) <= 4 * small_se),
        "cap_mc_consistent": bool(abs(cap_emp - cap_exact) <= 4 * cap_se),
        "small_bound": small_bound,
        "cap_lower_bound": cap_lower,
        "small_exact": small_exact,
        "cap_exact": cap_exact,
        "small_empirical": small_emp,
        "cap_empirical": cap_emp,
    }
    return report
