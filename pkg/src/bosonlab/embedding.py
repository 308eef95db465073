"""Worst-case embeddings: permanents of 0/1 matrices inside outcome probabilities.

Single-pattern construction. Given a c x c 0/1 matrix X and a pattern S
with exactly c occupied modes and n photons, widen X to A = (X | Y) where
Y holds s_i - 1 copies of the unit column e_i for each occupied mode i
(grouped, ascending mode order), then stack row i of A s_i times to get
the n x n matrix A_S. Then

    Per(A_S) = Per(X) * prod_i s_i!

so the outcome probability of S under any interferometer containing
A / sqrt-scaling encodes Per(X) exactly.

Two-pattern construction. Given an l x l 0/1 matrix X and patterns S, T
with equal photon number n, collision counts k_S = n - clicks(S) and
k_T = n - clicks(T) satisfying n = l + k_S + k_T, S having at least k_T
single-photon modes and T at least k_S (which forces l >= k_S, k_T, both
validated), build the (l + k_T) x (l + k_S) block matrix

    A = [[X, Y],
         [Z, 0]]

Row r of X carries the r-th value of S's occupied modes, multi-photon
values first (stable, ascending mode order); the k_T rows of Z carry the
leftover single-photon values of S. Y holds rho_r - 1 copies of e_r for
each X row r (rho_r = that row's S value); Z holds tau_j - 1 copies of
the unit row e_j for each X column j (tau_j = that column's T value).
Repeating rows per the S values and columns per the T values gives an
n x n matrix A_{S,T} with

    Per(A_{S,T}) = Per(X) * prod_i s_i! * prod_j t_j!
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ContractViolation
from .fock import OutcomePattern, as_pattern, click_stats, sample_uniform_outcome
from .permanent import per_exact_int
from .report import ExperimentReport
from .rng import TRIAL_BLOCK, stream

__all__ = [
    "EmbeddingSpec",
    "GbsEmbeddingSpec",
    "build_embedding",
    "verify_embedding_identity",
    "build_embedding_gbs",
    "verify_embedding_gbs_identity",
    "gbs_pattern_feasibility_experiment",
]


@dataclass(frozen=True)
class EmbeddingSpec:
    """Base matrix, pattern, widened matrix A, and row-repeated matrix A_S."""

    x: np.ndarray
    pattern: OutcomePattern
    a: np.ndarray
    a_s: np.ndarray


@dataclass(frozen=True)
class GbsEmbeddingSpec:
    """Base matrix, both patterns, block matrix A, and doubly repeated A_{S,T}."""

    x: np.ndarray
    pattern_s: OutcomePattern
    pattern_t: OutcomePattern
    a: np.ndarray
    a_st: np.ndarray
    l: int
    k_s: int
    k_t: int


def _as_01_matrix(x) -> np.ndarray:
    arr = np.asarray(x)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise ContractViolation(f"base matrix must be square, got shape {arr.shape}")
    if arr.dtype == object or not np.issubdtype(arr.dtype, np.integer):
        try:
            cast = arr.astype(np.int64)
        except (TypeError, ValueError) as exc:
            raise ContractViolation("base matrix must hold integers") from exc
        if not np.array_equal(cast, arr):
            raise ContractViolation("base matrix must hold integers")
        arr = cast
    if not np.all((arr == 0) | (arr == 1)):
        raise ContractViolation("base matrix entries must be 0 or 1")
    return arr.astype(np.int64)


def build_embedding(x, s) -> EmbeddingSpec:
    """Widen X by unit columns and repeat rows so Per(A_S) = Per(X) * prod s_i!."""
    arr = _as_01_matrix(x)
    pat = as_pattern(s)
    values = [v for v in pat.occupations if v > 0]
    c = len(values)
    if arr.shape[0] != c:
        raise ContractViolation(
            f"base matrix is {arr.shape[0]} x {arr.shape[0]} but the pattern has {c} occupied modes"
        )
    n = pat.n
    blocks = [arr]
    for r, v in enumerate(values):
        for _ in range(v - 1):
            col = np.zeros((c, 1), dtype=np.int64)
            col[r, 0] = 1
            blocks.append(col)
    a = np.hstack(blocks)
    assert a.shape == (c, n)
    a_s = np.repeat(a, values, axis=0)
    return EmbeddingSpec(x=arr, pattern=pat, a=a, a_s=a_s)


def verify_embedding_identity(spec: EmbeddingSpec) -> tuple[int, int, bool]:
    """(Per(A_S), Per(X) * prod s_i!, equal) in exact integer arithmetic."""
    lhs = per_exact_int(spec.a_s)
    rhs = per_exact_int(spec.x)
    for v in spec.pattern.occupations:
        rhs *= math.factorial(v)
    return lhs, rhs, lhs == rhs


def _split_values(pat: OutcomePattern) -> list[int]:
    # occupied-mode values, multi-photon first, each group ascending mode order
    values = [v for v in pat.occupations if v > 0]
    return [v for v in values if v >= 2] + [v for v in values if v == 1]


def build_embedding_gbs(x, s, t) -> GbsEmbeddingSpec:
    """Block construction realizing Per(X) * prod s_i! * prod t_j! as Per(A_{S,T})."""
    arr = _as_01_matrix(x)
    l = arr.shape[0]
    pat_s = as_pattern(s)
    pat_t = as_pattern(t)
    n = pat_s.n
    if pat_t.n != n:
        raise ContractViolation(f"patterns place {n} and {pat_t.n} photons; totals must match")
    if n < 1:
        raise ContractViolation("patterns must place at least one photon")
    cs_stat = click_stats(pat_s)
    ct_stat = click_stats(pat_t)
    k_s, k_t = cs_stat.collisions, ct_stat.collisions
    if l != n - k_s - k_t:
        raise ContractViolation(
            f"base matrix size {l} != n - k_S - k_T = {n - k_s - k_t} (n={n}, k_S={k_s}, k_T={k_t})"
        )
    if l < 1:
        raise ContractViolation("patterns leave no base block: need n - k_S - k_T >= 1")
    if cs_stat.singles < k_t:
        raise ContractViolation(
            f"first pattern has {cs_stat.singles} single-photon modes, needs >= k_T = {k_t}"
        )
    if ct_stat.singles < k_s:
        raise ContractViolation(
            f"second pattern has {ct_stat.singles} single-photon modes, needs >= k_S = {k_s}"
        )
    if l < k_s or l < k_t:
        raise ContractViolation(f"base size {l} must be >= k_S = {k_s} and >= k_T = {k_t}")
    rho = _split_values(pat_s)  # length l + k_t; rho[l:] are all 1
    tau = _split_values(pat_t)  # length l + k_s; tau[l:] are all 1
    assert len(rho) == l + k_t and all(v == 1 for v in rho[l:])
    assert len(tau) == l + k_s and all(v == 1 for v in tau[l:])
    a = np.zeros((l + k_t, l + k_s), dtype=np.int64)
    a[:l, :l] = arr
    col = l
    for r in range(l):
        for _ in range(rho[r] - 1):
            a[r, col] = 1
            col += 1
    assert col == l + k_s
    row = l
    for j in range(l):
        for _ in range(tau[j] - 1):
            a[row, j] = 1
            row += 1
    assert row == l + k_t
    row_mult = rho[:l] + [1] * k_t
    col_mult = tau[:l] + [1] * k_s
    a_st = np.repeat(np.repeat(a, row_mult, axis=0), col_mult, axis=1)
    assert a_st.shape == (n, n)
    return GbsEmbeddingSpec(
        x=arr, pattern_s=pat_s, pattern_t=pat_t, a=a, a_st=a_st, l=l, k_s=k_s, k_t=k_t
    )


def verify_embedding_gbs_identity(spec: GbsEmbeddingSpec) -> tuple[int, int, bool]:
    """(Per(A_{S,T}), Per(X) * prod s_i! * prod t_j!, equal), exact integers."""
    lhs = per_exact_int(spec.a_st)
    rhs = per_exact_int(spec.x)
    for v in spec.pattern_s.occupations:
        rhs *= math.factorial(v)
    for v in spec.pattern_t.occupations:
        rhs *= math.factorial(v)
    return lhs, rhs, lhs == rhs


def gbs_pattern_feasibility_experiment(m: int, n: int, trials: int, seed: int) -> ExperimentReport:
    """Frequency with which independent uniform pattern pairs admit the block embedding.

    Feasible means k_T <= n/3 <= singles(S) and k_S <= n/3 <= singles(T),
    which implies every condition of build_embedding_gbs with base size
    l = n - k_S - k_T >= n/3. The frequency should approach 1 as n grows
    when m >= 2.1 n; a warning flag is set below that ratio.
    """
    if trials < 1:
        raise ContractViolation("trials must be >= 1")
    feasible = 0
    s_side_ok = 0
    t_side_ok = 0
    done = 0
    block_id = 0
    while done < trials:
        count = min(TRIAL_BLOCK, trials - done)
        rng = stream(seed, block_id)
        for _ in range(count):
            st_s = click_stats(sample_uniform_outcome(m, n, rng))
            st_t = click_stats(sample_uniform_outcome(m, n, rng))
            ok_s = 3 * st_t.collisions <= n <= 3 * st_s.singles
            ok_t = 3 * st_s.collisions <= n <= 3 * st_t.singles
            s_side_ok += ok_s
            t_side_ok += ok_t
            feasible += ok_s and ok_t
        done += count
        block_id += 1
    freq = feasible / trials
    se = math.sqrt(max(freq * (1 - freq), 1e-12) / trials)
    report = ExperimentReport(
        name="gbs-feasibility",
        description="frequency of uniform pattern pairs satisfying the two-pattern embedding conditions",
        config={"m": m, "n": n, "trials": trials, "seed": seed, "block": TRIAL_BLOCK},
        columns=["quantity", "value"],
    )
    report.add_row("feasible_frequency", freq)
    report.add_row("stderr", se)
    report.add_row("first_condition_frequency", s_side_ok / trials)
    report.add_row("second_condition_frequency", t_side_ok / trials)
    report.summary = {
        "feasible_frequency": freq,
        "stderr": se,
        "ci95_low": max(0.0, freq - 1.96 * se),
        "ci95_high": min(1.0, freq + 1.96 * se),
        "mode_ratio_ok": bool(m >= 2.1 * n),
    }
    return report
