"""Outcome distributions of linear-optical sampling with repeated rows.

The probability of pattern S under an m x m interferometer U with n
photons fed one per mode into the first n inputs is

    p(S) = |Per(U_S)|^2 / prod_i s_i!

where U_S stacks row i of the first n columns s_i times. Summed over the
C(m+n-1, n) patterns this is exactly 1 for unitary U.

The anticoncentration experiment samples log p(S) with S uniform over the
outcome space and U Haar, n photons in m = ceil(alpha*n) modes, and
summarizes the quartiles against the uniform-distribution reference
-log C(m+n-1, n).
"""

from __future__ import annotations

import math
import time
from typing import Iterable

import numpy as np

from .errors import CapacityError, ContractViolation
from .fock import (
    OutcomePattern,
    as_pattern,
    click_stats,
    dim_fock,
    enumerate_outcomes,
    rank_outcome,
    sample_uniform_outcome,
)
from .permanent import PER_EXACT_CAP, per_exact
from .randmat import _haar_from_rng, submatrix_with_repetitions
from .report import ExperimentReport, five_number_summary
from .rng import stream

__all__ = [
    "outcome_probability",
    "log_outcome_probability",
    "full_distribution",
    "exact_sampler",
    "anticoncentration_experiment",
    "FULL_DISTRIBUTION_DIM_CAP",
    "FULL_DISTRIBUTION_N_CAP",
]

FULL_DISTRIBUTION_DIM_CAP = 100_000
FULL_DISTRIBUTION_N_CAP = 12


def _pattern_factorial(pat: OutcomePattern) -> int:
    out = 1
    for s in pat.occupations:
        out *= math.factorial(s)
    return out


def outcome_probability(u, s) -> float:
    """p(S) = |Per(U_S)|^2 / prod s_i! for the given interferometer and pattern.

    The caller supplies a unitary U; the formula is evaluated as given and
    only sums to a distribution when U actually is unitary.
    """
    pat = as_pattern(s)
    if pat.n > PER_EXACT_CAP:
        raise CapacityError(f"{pat.n} photons exceed the permanent cap {PER_EXACT_CAP}")
    z = per_exact(submatrix_with_repetitions(u, pat))
    return (z.real * z.real + z.imag * z.imag) / _pattern_factorial(pat)


def log_outcome_probability(u, s) -> float:
    """ln p(S), with -inf for exactly vanishing permanents."""
    pat = as_pattern(s)
    if pat.n > PER_EXACT_CAP:
        raise CapacityError(f"{pat.n} photons exceed the permanent cap {PER_EXACT_CAP}")
    z = per_exact(submatrix_with_repetitions(u, pat))
    mag = abs(z)
    if mag == 0.0:
        return float("-inf")
    return 2.0 * math.log(mag) - math.log(_pattern_factorial(pat))


def full_distribution(u, m: int, n: int) -> dict[OutcomePattern, float]:
    """All pattern probabilities, keyed in ascending colex order.

    Guarded: refuses dim > 1e5 or n > 12 (exact permanents of every
    pattern get expensive past that).
    """
    mat = np.asarray(u)
    if mat.ndim != 2 or mat.shape != (m, m):
        raise ContractViolation(f"expected a {m} x {m} matrix, got shape {mat.shape}")
    d = dim_fock(m, n)
    if d > FULL_DISTRIBUTION_DIM_CAP or n > FULL_DISTRIBUTION_N_CAP:
        raise CapacityError(
            f"full distribution at m={m}, n={n} (dim {d}) exceeds caps "
            f"(dim {FULL_DISTRIBUTION_DIM_CAP}, n {FULL_DISTRIBUTION_N_CAP})"
        )
    return {pat: outcome_probability(mat, pat) for pat in enumerate_outcomes(m, n)}


def exact_sampler(u, m: int, n: int, rng: np.random.Generator, size: int | None = None):
    """Draw patterns from the exact distribution by inverse CDF.

    size=None returns one OutcomePattern; size=k returns a list of k.
    Subject to the same capacity guards as full_distribution.
    """
    dist = full_distribution(u, m, n)
    patterns = list(dist.keys())
    cdf = np.cumsum(np.fromiter(dist.values(), dtype=float, count=len(patterns)))
    total = cdf[-1]
    count = 1 if size is None else int(size)
    if count < 1:
        raise ContractViolation("size must be >= 1")
    idx = np.searchsorted(cdf, rng.random(count) * total, side="right")
    idx = np.minimum(idx, len(patterns) - 1)
    if size is None:
        return patterns[int(idx[0])]
    return [patterns[int(i)] for i in idx]


def anticoncentration_experiment(
    n_values: Iterable[int],
    alpha: float = 2.0,
    units: int = 20,
    outcomes_per_unit: int = 20,
    seed: int = 0,
    long_run: bool = False,
) -> ExperimentReport:
    """Box statistics of ln p(S) for Haar U and uniform S, per photon number.

    For each n: m = ceil(alpha*n); `units` Haar draws; `outcomes_per_unit`
    uniform patterns per draw (cross product, units*outcomes_per_unit
    samples). Each unit re-derives its own stream as
    stream(seed, n*1000 + unit_index); the Haar matrix is drawn first,
    then that unit's patterns, so the whole run is reproducible from
    (seed, n_values, units, outcomes_per_unit).

    Without long_run, n is capped at 16 to keep the run interactive.
    """
    t0 = time.monotonic()
    n_values = sorted(set(int(n) for n in n_values))
    if not n_values or n_values[0] < 1:
        raise ContractViolation("need at least one n >= 1")
    cap = PER_EXACT_CAP if long_run else 16
    if n_values[-1] > cap:
        raise CapacityError(
            f"n = {n_values[-1]} exceeds the cap {cap}"
            + ("" if long_run else " (pass long_run=True to lift it to 34)")
        )
    if alpha < 1.0:
        raise ContractViolation(f"need alpha >= 1, got {alpha}")
    if units < 1 or outcomes_per_unit < 1:
        raise ContractViolation("units and outcomes_per_unit must be >= 1")
    report = ExperimentReport(
        name="anticoncentration",
        description="distribution of log outcome probabilities under Haar interferometers vs. the uniform reference",
        config={
            "n_values": n_values,
            "alpha": alpha,
            "units": units,
            "outcomes_per_unit": outcomes_per_unit,
            "seed": seed,
            "stream_scheme": "stream(seed, n*1000 + unit)",
        },
        columns=["n", "m", "unit_index", "outcome_rank", "clicks", "log_prob", "log_dim"],
    )
    summary: dict[str, dict] = {}
    for n in n_values:
        m = math.ceil(alpha * n)
        log_dim = math.log(dim_fock(m, n))
        finite: list[float] = []
        zeros = 0
        for unit in range(units):
            rng = stream(seed, n * 1000 + unit)
            u = _haar_from_rng(m, 1, rng)[0]
            for _ in range(outcomes_per_unit):
                pat = sample_uniform_outcome(m, n, rng)
                lp = log_outcome_probability(u, pat)
                report.add_row(
                    n, m, unit, rank_outcome(pat), click_stats(pat).clicks, lp, log_dim
                )
                if math.isinf(lp):
                    zeros += 1
                else:
                    finite.append(lp)
        box = five_number_summary(finite)
        summary[str(n)] = {
            "m": m,
            "samples": units * outcomes_per_unit,
            "zero_probability_samples": zeros,
            "log_dim": log_dim,
            "box": box,
            "box_shifted": {k: (None if v is None else v + log_dim) for k, v in box.items()},
        }
    report.summary = summary
    report.wallclock_s = time.monotonic() - t0
    return report
