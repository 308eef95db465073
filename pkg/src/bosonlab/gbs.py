"""Gaussian-state sampling with identical squeezing on every mode.

With squeezing r on each of m input modes and interferometer U (optionally
a second interferometer W behind the squeezers; identity by default), the
joint probability of input-side pattern T and output-side pattern S is

    q(S, T) = |Per(C_{S,T})|^2 / (Z * prod_i s_i! * prod_j t_j!),
    C = tanh(r) * U W^dagger,      Z = cosh(r)^(2m),

where C_{S,T} repeats row i of C t_i times and column j s_j times.
Both patterns share the photon number n; the total photon number follows
the negative-binomial law

    P(n) = C(n+m-1, n) * tanh(r)^(2n) / cosh(r)^(2m)

with mean m*sinh(r)^2 (each mode contributes an independent geometric
count). Conditioned on n, the pair (S, T) follows

    p(S, T) = |Per(U_{S,T})|^2 / (C(m+n-1, n) * prod s_i! * prod t_j!),

and q(S, T) = P(n) * p(S, T). Summing p over S at fixed T gives
1 / C(m+n-1, n) (single-distribution normalization), so p sums to 1 over
the sector grid and q to P(n).
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy import stats

from .errors import CapacityError, ContractViolation, DomainError
from .fock import as_pattern, dim_fock, enumerate_outcomes
from .permanent import PER_EXACT_CAP, per_exact
from .randmat import HaarDraw, haar_unitary
from .report import ExperimentReport
from .rng import TRIAL_BLOCK, stream

__all__ = [
    "GbsConfig",
    "ModeForms",
    "photon_number_pmf",
    "photon_number_mean",
    "photon_number_variance",
    "photon_number_variance_alt",
    "photon_number_mode",
    "photon_number_truncation",
    "photon_number_stats_experiment",
    "submatrix_rows_cols",
    "postselected_probability",
    "gbs_probability",
    "conditional_normalization_by_input",
    "postselected_normalization",
    "gbs_sector_mass",
    "gbs_normalization_experiment",
    "GBS_SECTOR_DIM_CAP",
]

GBS_SECTOR_DIM_CAP = 1000


@dataclass(frozen=True)
class GbsConfig:
    """m modes, squeezing r on each, interferometer u, optional second unitary w."""

    m: int
    r: float
    u: np.ndarray
    w: np.ndarray | None = None

    def __post_init__(self):
        if self.m < 1:
            raise ContractViolation(f"need m >= 1, got {self.m}")
        if self.r < 0:
            raise ContractViolation(f"need r >= 0, got {self.r}")
        u = self.u.matrix if isinstance(self.u, HaarDraw) else np.asarray(self.u, dtype=np.complex128)
        if u.shape != (self.m, self.m):
            raise ContractViolation(f"u must be {self.m} x {self.m}, got {u.shape}")
        object.__setattr__(self, "u", u)
        if self.w is not None:
            w = np.asarray(self.w, dtype=np.complex128)
            if w.shape != (self.m, self.m):
                raise ContractViolation(f"w must be {self.m} x {self.m}, got {w.shape}")
            object.__setattr__(self, "w", w)

    def effective_unitary(self) -> np.ndarray:
        return self.u if self.w is None else self.u @ self.w.conj().T

    def c_matrix(self) -> np.ndarray:
        return math.tanh(self.r) * self.effective_unitary()


def photon_number_pmf(m: int, r: float, n: int) -> float:
    """P(total photons = n) = C(n+m-1, n) tanh^(2n) r / cosh^(2m) r."""
    if m < 1 or n < 0:
        raise ContractViolation(f"need m >= 1 and n >= 0, got m={m}, n={n}")
    if r < 0:
        raise ContractViolation(f"need r >= 0, got {r}")
    if r == 0:
        return 1.0 if n == 0 else 0.0
    log_p = (
        math.lgamma(n + m) - math.lgamma(n + 1) - math.lgamma(m)
        + 2 * n * math.log(math.tanh(r))
        - 2 * m * math.log(math.cosh(r))
    )
    return math.exp(log_p)


def photon_number_mean(m: int, r: float) -> float:
    """E n = m sinh^2 r."""
    return m * math.sinh(r) ** 2


def photon_number_variance(m: int, r: float) -> float:
    """Negative-binomial variance m sinh^2 r cosh^2 r."""
    return m * math.sinh(r) ** 2 * math.cosh(r) ** 2


def photon_number_variance_alt(m: int, r: float) -> float:
    """Alternative closed form m cosh^2 r / sinh^4 r, kept for comparison.

    Disagrees with the negative-binomial variance; the stats experiment
    reports which one the empirical variance matches.
    """
    sh = math.sinh(r)
    if sh == 0:
        return float("inf")
    return m * math.cosh(r) ** 2 / sh ** 4


class ModeForms(NamedTuple):
    scan: int
    floor_m_minus_1: int
    floor_m: int


def photon_number_mode(m: int, r: float, scan_limit: int | None = None) -> ModeForms:
    """argmax_n P(n) by direct scan, next to both closed-form candidates.

    The pmf ratio P(n)/P(n-1) = (n+m-1)/n * tanh^2 r crosses 1 at
    n = (m-1) sinh^2 r, so the scan argmax equals floor((m-1) sinh^2 r)
    except at integer crossings (ties broken toward the smaller n).
    """
    if r == 0:
        return ModeForms(scan=0, floor_m_minus_1=0, floor_m=0)
    sh2 = math.sinh(r) ** 2
    limit = scan_limit if scan_limit is not None else int(4 * m * sh2 + 20)
    q = math.tanh(r) ** 2
    best_n = 0
    ratio_n = 0
    # walk the unimodal pmf via exact ratios; stop once past the peak
    for n in range(1, limit + 1):
        if (n + m - 1) * q / n >= 1.0:
            ratio_n = n
        else:
            break
    best_n = ratio_n
    return ModeForms(
        scan=best_n,
        floor_m_minus_1=math.floor((m - 1) * sh2),
        floor_m=math.floor(m * sh2),
    )


def photon_number_truncation(m: int, r: float, tail: float = 1e-12) -> int:
    """Smallest N with P(n > N) < tail, via the negative-binomial survival function."""
    if not 0 < tail < 1:
        raise ContractViolation(f"tail must lie in (0, 1), got {tail}")
    if r == 0:
        return 0
    p_success = 1.0 / math.cosh(r) ** 2
    dist = stats.nbinom(m, p_success)
    guess = int(dist.isf(tail))
    n = max(guess - 2, 0)
    while dist.sf(n) >= tail:
        n += 1
    return n


def photon_number_stats_experiment(m: int, r: float, trials: int, seed: int) -> ExperimentReport:
    """Empirical mean/variance of the photon number vs. both closed forms.

    Draws the per-mode geometric counts directly (success probability
    1/cosh^2 r) and sums them, which is the definition of the law being
    tested, independent of the pmf formula.
    """
    if trials < 2:
        raise ContractViolation("trials must be >= 2")
    if r <= 0:
        raise DomainError("stats experiment needs r > 0")
    p_success = 1.0 / math.cosh(r) ** 2
    samples = np.empty(trials, dtype=np.int64)
    done = 0
    block_id = 0
    while done < trials:
        count = min(TRIAL_BLOCK, trials - done)
        rng = stream(seed, block_id)
        draws = rng.geometric(p_success, size=(count, m)) - 1
        samples[done : done + count] = draws.sum(axis=1)
        done += count
        block_id += 1
    emp_mean = float(np.mean(samples))
    emp_var = float(np.var(samples, ddof=1))
    mean_formula = photon_number_mean(m, r)
    var_nb = photon_number_variance(m, r)
    var_alt = photon_number_variance_alt(m, r)
    n_max = int(np.max(samples))
    report = ExperimentReport(
        name="gbs-photon-stats",
        description="empirical total-photon-number moments under per-mode geometric counts vs. closed forms",
        config={"m": m, "r": r, "trials": trials, "seed": seed, "block": TRIAL_BLOCK},
        columns=["n", "empirical_frequency", "pmf"],
    )
    hist = np.bincount(samples, minlength=n_max + 1)
    for n in range(n_max + 1):
        report.add_row(n, hist[n] / trials, photon_number_pmf(m, r, n))
    mean_se = math.sqrt(var_nb / trials)
    report.summary = {
        "empirical_mean": emp_mean,
        "mean_formula": mean_formula,
        "mean_within_4se": bool(abs(emp_mean - mean_formula) <= 4 * mean_se),
        "empirical_variance": emp_var,
        "variance_negative_binomial": var_nb,
        "variance_alt_form": var_alt,
        "variance_matches_negative_binomial": bool(
            abs(emp_var - var_nb) < abs(emp_var - var_alt)
        ),
    }
    return report


def submatrix_rows_cols(u, s, t) -> np.ndarray:
    """Row i repeated t_i times, column j repeated s_j times."""
    mat = np.asarray(u)
    pat_s = as_pattern(s)
    pat_t = as_pattern(t)
    if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
        raise ContractViolation(f"expected a square matrix, got shape {mat.shape}")
    m = mat.shape[0]
    if pat_s.m != m or pat_t.m != m:
        raise ContractViolation(f"patterns must have {m} modes, got {pat_s.m} and {pat_t.m}")
    if pat_s.n != pat_t.n:
        raise ContractViolation(f"patterns place {pat_s.n} and {pat_t.n} photons; totals must match")
    return np.repeat(np.repeat(mat, pat_t.occupations, axis=0), pat_s.occupations, axis=1)


def _double_factorial_norm(s, t) -> float:
    out = 1.0
    for v in as_pattern(s).occupations:
        out *= math.factorial(v)
    for v in as_pattern(t).occupations:
        out *= math.factorial(v)
    return out


def postselected_probability(u, s, t) -> float:
    """p(S, T) conditioned on the photon number: |Per(U_{S,T})|^2 / (dim * prod s! prod t!)."""
    pat_s = as_pattern(s)
    if pat_s.n > PER_EXACT_CAP:
        raise CapacityError(f"{pat_s.n} photons exceed the permanent cap {PER_EXACT_CAP}")
    mat = u.matrix if isinstance(u, HaarDraw) else np.asarray(u)
    z = per_exact(submatrix_rows_cols(mat, s, t))
    d = dim_fock(mat.shape[0], pat_s.n)
    return (z.real * z.real + z.imag * z.imag) / (d * _double_factorial_norm(s, t))


def gbs_probability(cfg: GbsConfig, s, t) -> float:
    """Unconditioned q(S, T) = |Per(C_{S,T})|^2 / (cosh^(2m) r * prod s! prod t!)."""
    pat_s = as_pattern(s)
    if pat_s.n > PER_EXACT_CAP:
        raise CapacityError(f"{pat_s.n} photons exceed the permanent cap {PER_EXACT_CAP}")
    z = per_exact(submatrix_rows_cols(cfg.c_matrix(), s, t))
    log_z_norm = 2 * cfg.m * math.log(math.cosh(cfg.r))
    return (z.real * z.real + z.imag * z.imag) * math.exp(-log_z_norm) / _double_factorial_norm(s, t)


def _sector_guard(m: int, n: int) -> int:
    d = dim_fock(m, n)
    if d > GBS_SECTOR_DIM_CAP or n > 8:
        raise CapacityError(
            f"sector grid at m={m}, n={n} has {d}^2 pattern pairs; caps are dim {GBS_SECTOR_DIM_CAP}, n 8"
        )
    return d


def conditional_normalization_by_input(u, t) -> float:
    """sum_S |Per(U_{S,T})|^2 / (prod s! prod t!) at fixed T; equals 1 for unitary U."""
    mat = u.matrix if isinstance(u, HaarDraw) else np.asarray(u)
    pat_t = as_pattern(t)
    m = mat.shape[0]
    _sector_guard(m, pat_t.n)
    total = 0.0
    for pat_s in enumerate_outcomes(m, pat_t.n):
        z = per_exact(submatrix_rows_cols(mat, pat_s, pat_t))
        total += (z.real * z.real + z.imag * z.imag) / _double_factorial_norm(pat_s, pat_t)
    return total


def postselected_normalization(u, n: int) -> float:
    """sum over all (S, T) pairs of p(S, T); equals 1 for unitary U."""
    mat = u.matrix if isinstance(u, HaarDraw) else np.asarray(u)
    m = mat.shape[0]
    _sector_guard(m, n)
    total = 0.0
    for pat_t in enumerate_outcomes(m, n):
        for pat_s in enumerate_outcomes(m, n):
            total += postselected_probability(mat, pat_s, pat_t)
    return total


def gbs_sector_mass(cfg: GbsConfig, n: int) -> float:
    """sum over the n-photon sector of q(S, T); equals P(n) for unitary optics."""
    _sector_guard(cfg.m, n)
    total = 0.0
    for pat_t in enumerate_outcomes(cfg.m, n):
        for pat_s in enumerate_outcomes(cfg.m, n):
            total += gbs_probability(cfg, pat_s, pat_t)
    return total


def gbs_normalization_experiment(
    m: int, n: int, draws: int, seed: int, r: float = 0.65
) -> ExperimentReport:
    """Sector-mass and postselected normalization across Haar draws."""
    if draws < 1:
        raise ContractViolation("draws must be >= 1")
    t0 = time.monotonic()
    report = ExperimentReport(
        name="gbs-normalize",
        description="sector normalization of the two-pattern Gaussian law across Haar interferometers",
        config={"m": m, "n": n, "draws": draws, "seed": seed, "r": r},
        columns=["draw", "postselected_total", "sector_mass", "pmf"],
    )
    pmf = photon_number_pmf(m, r, n)
    max_dev_post = 0.0
    max_dev_sector = 0.0
    for k in range(draws):
        u = haar_unitary(m, seed, stream_id=k)
        cfg = GbsConfig(m=m, r=r, u=u.matrix)
        total = postselected_normalization(u.matrix, n)
        mass = gbs_sector_mass(cfg, n)
        report.add_row(k, total, mass, pmf)
        max_dev_post = max(max_dev_post, abs(total - 1.0))
        max_dev_sector = max(max_dev_sector, abs(mass - pmf) / pmf)
    report.summary = {
        "max_postselected_deviation": max_dev_post,
        "max_sector_mass_rel_deviation": max_dev_sector,
        "pmf": pmf,
    }
    report.wallclock_s = time.monotonic() - t0
    return report
