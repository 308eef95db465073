"""Outcome patterns of n photons in m modes and their combinatorics.

The outcome space is the set of occupation vectors (s_1, ..., s_m) with
nonnegative integer entries summing to n; its size is C(m+n-1, n).
Patterns are ordered ascending-colexicographically (last coordinate is
the most significant key), which for m = n = 2 gives
(2,0), (1,1), (0,2). Ranking, unranking, and uniform sampling all use
exact integer arithmetic, so they stay correct when the space dimension
exceeds 2**63.

Click statistics: a mode is a "click" if it holds at least one photon.
For a uniform pattern the click count follows the hypergeometric law
  P(c) = C(m, c) * C(n-1, n-c) / C(m+n-1, n)
with mean m*n/(m+n-1), and deviations of t*n from that mean have
probability at most 2*exp(-2*t**2*n).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator, NamedTuple, Sequence

import numpy as np

from .errors import CapacityError, ContractViolation
from .report import ExperimentReport
from .rng import TRIAL_BLOCK, stream, uniform_bigint

__all__ = [
    "OutcomePattern",
    "ClickStats",
    "ClickTailResult",
    "as_pattern",
    "dim_fock",
    "enumerate_outcomes",
    "rank_outcome",
    "unrank_outcome",
    "sample_uniform_outcome",
    "click_stats",
    "click_count",
    "click_pmf",
    "click_mean",
    "click_tail_exact",
    "click_concentration_check",
    "click_experiment",
    "ENUMERATION_CAP",
]

ENUMERATION_CAP = 10_000_000


@dataclass(frozen=True)
class OutcomePattern:
    """Occupation vector: photons per mode, all entries >= 0."""

    occupations: tuple[int, ...]

    def __post_init__(self):
        occ = tuple(self.occupations)
        if len(occ) == 0:
            raise ContractViolation("a pattern needs at least one mode")
        clean = []
        for x in occ:
            if isinstance(x, bool) or not isinstance(x, (int, np.integer)):
                raise ContractViolation(f"occupations must be integers, got {x!r}")
            if x < 0:
                raise ContractViolation(f"occupations must be >= 0, got {x}")
            clean.append(int(x))
        object.__setattr__(self, "occupations", tuple(clean))

    @property
    def m(self) -> int:
        return len(self.occupations)

    @property
    def n(self) -> int:
        return sum(self.occupations)

    def __iter__(self):
        return iter(self.occupations)

    def __len__(self) -> int:
        return len(self.occupations)

    def __getitem__(self, i):
        return self.occupations[i]


def as_pattern(s) -> OutcomePattern:
    """Coerce a pattern-like sequence to OutcomePattern."""
    if isinstance(s, OutcomePattern):
        return s
    return OutcomePattern(tuple(s))


class ClickStats(NamedTuple):
    clicks: int       # occupied modes
    collisions: int   # n - clicks
    singles: int      # modes holding exactly one photon


class ClickTailResult(NamedTuple):
    empirical: float
    bound: float
    center: float
    exact_tail: float


def dim_fock(m: int, n: int) -> int:
    """Number of n-photon patterns on m modes: C(m+n-1, n)."""
    if m < 1 or n < 0:
        raise ContractViolation(f"need m >= 1 and n >= 0, got m={m}, n={n}")
    return math.comb(m + n - 1, n)


def _iter_occ(m: int, n: int) -> Iterator[tuple[int, ...]]:
    # iterative colex successor; recursion would cap m near the stack limit
    occ = [0] * m
    occ[0] = n
    while True:
        yield tuple(occ)
        j = next((i for i, v in enumerate(occ) if v), m - 1)
        if j >= m - 1:
            return
        # move one photon right, return the rest of mode j to mode 0
        occ[0] = occ[j] - 1
        if j > 0:
            occ[j] = 0
        occ[j + 1] += 1


def enumerate_outcomes(m: int, n: int) -> Iterator[OutcomePattern]:
    """Yield every pattern in ascending colex order.

    Guarded: refuses spaces larger than ENUMERATION_CAP patterns.
    """
    d = dim_fock(m, n)
    if d > ENUMERATION_CAP:
        raise CapacityError(f"outcome space of size {d} exceeds enumeration cap {ENUMERATION_CAP}")
    for occ in _iter_occ(m, n):
        yield OutcomePattern(occ)


def rank_outcome(s) -> int:
    """Position of the pattern in the ascending colex enumeration."""
    occ = as_pattern(s).occupations
    n = sum(occ)
    r = 0
    for j in range(len(occ) - 1, 0, -1):
        # patterns whose j-th coordinate is smaller come first
        for v in range(occ[j]):
            r += dim_fock(j, n - v)
        n -= occ[j]
    return r


def unrank_outcome(m: int, n: int, r: int) -> OutcomePattern:
    """Inverse of rank_outcome on the (m, n) outcome space."""
    d = dim_fock(m, n)
    if not 0 <= r < d:
        raise ContractViolation(f"rank {r} outside [0, {d})")
    occ = [0] * m
    for j in range(m - 1, 0, -1):
        v = 0
        while True:
            block = dim_fock(j, n - v)
            if r < block:
                break
            r -= block
            v += 1
        occ[j] = v
        n -= v
    occ[0] = n
    return OutcomePattern(tuple(occ))


def sample_uniform_outcome(m: int, n: int, rng: np.random.Generator) -> OutcomePattern:
    """Exactly uniform pattern, valid for outcome spaces of any size."""
    return unrank_outcome(m, n, uniform_bigint(rng, dim_fock(m, n)))


def click_stats(s) -> ClickStats:
    occ = as_pattern(s).occupations
    clicks = sum(1 for x in occ if x >= 1)
    singles = sum(1 for x in occ if x == 1)
    return ClickStats(clicks=clicks, collisions=sum(occ) - clicks, singles=singles)


def click_count(m: int, n: int, c: int) -> int:
    """Exact number of patterns with c occupied modes: C(m,c) * C(n-1, n-c)."""
    if m < 1 or n < 1:
        raise ContractViolation(f"need m >= 1 and n >= 1, got m={m}, n={n}")
    if c < 1 or c > min(m, n):
        return 0
    return math.comb(m, c) * math.comb(n - 1, n - c)


def click_pmf(m: int, n: int, c: int) -> float:
    """P(click count = c) under a uniform pattern.

    Exact rational click_count/dim_fock evaluated in double precision.
    Out-of-range c returns 0.0.
    """
    return click_count(m, n, c) / dim_fock(m, n)


def click_mean(m: int, n: int) -> float:
    """Expected click count m*n/(m+n-1) (hypergeometric mean)."""
    if m < 1 or n < 1:
        raise ContractViolation(f"need m >= 1 and n >= 1, got m={m}, n={n}")
    return m * n / (m + n - 1)


def click_tail_exact(m: int, n: int, t: float) -> float:
    """P(|clicks - mean| >= t*n) summed from the exact pmf."""
    center = click_mean(m, n)
    total = 0.0
    for c in range(1, min(m, n) + 1):
        if abs(c - center) >= t * n:
            total += click_pmf(m, n, c)
    return total


def _click_histogram(m: int, n: int, trials: int, seed: int) -> dict[int, int]:
    # Trials run in fixed-size blocks, one stream per block, so the
    # histogram is deterministic given (seed, trials) alone.
    counts = {c: 0 for c in range(1, min(m, n) + 1)}
    done = 0
    block_id = 0
    while done < trials:
        count = min(TRIAL_BLOCK, trials - done)
        rng = stream(seed, block_id)
        for _ in range(count):
            counts[click_stats(sample_uniform_outcome(m, n, rng)).clicks] += 1
        done += count
        block_id += 1
    return counts


def click_concentration_check(
    m: int, n: int, t: float, trials: int, seed: int
) -> ClickTailResult:
    """Monte Carlo deviation probability of the click count vs. 2*exp(-2*t^2*n).

    Draws uniform patterns, counts clicks, and compares the frequency of
    |clicks - m*n/(m+n-1)| >= t*n against the concentration bound and the
    exact pmf tail.
    """
    if trials < 1:
        raise ContractViolation("trials must be >= 1")
    if not 0 < t <= 1:
        raise ContractViolation(f"need 0 < t <= 1, got t={t}")
    center = click_mean(m, n)
    counts = _click_histogram(m, n, trials, seed)
    hits = sum(k for c, k in counts.items() if abs(c - center) >= t * n)
    bound = min(1.0, 2.0 * math.exp(-2.0 * t * t * n))
    return ClickTailResult(
        empirical=hits / trials,
        bound=bound,
        center=center,
        exact_tail=click_tail_exact(m, n, t),
    )


def click_experiment(m: int, n: int, t: float, trials: int, seed: int) -> ExperimentReport:
    """Full click-law report: exact pmf per c, MC histogram, tail vs. bound."""
    if trials < 1:
        raise ContractViolation("trials must be >= 1")
    if not 0 < t <= 1:
        raise ContractViolation(f"need 0 < t <= 1, got t={t}")
    center = click_mean(m, n)
    counts = _click_histogram(m, n, trials, seed)
    hits = sum(k for c, k in counts.items() if abs(c - center) >= t * n)
    result = ClickTailResult(
        empirical=hits / trials,
        bound=min(1.0, 2.0 * math.exp(-2.0 * t * t * n)),
        center=center,
        exact_tail=click_tail_exact(m, n, t),
    )
    report = ExperimentReport(
        name="clicks",
        description="click-count law of uniform photon patterns: exact pmf, Monte Carlo histogram, and tail concentration",
        config={"m": m, "n": n, "t": t, "trials": trials, "seed": seed, "block": TRIAL_BLOCK},
        columns=["c", "pmf_exact", "mc_frequency"],
    )
    for c in range(1, min(m, n) + 1):
        report.add_row(c, click_pmf(m, n, c), counts[c] / trials)
    se = math.sqrt(max(result.empirical * (1 - result.empirical), 1e-12) / trials)
    report.summary = {
        "center": result.center,
        "tail_empirical": result.empirical,
        "tail_empirical_stderr": se,
        "tail_exact": result.exact_tail,
        "bound": result.bound,
        "within_bound": bool(result.empirical <= result.bound),
        "mean_exact": click_mean(m, n),
        "dim": dim_fock(m, n),
    }
    return report
