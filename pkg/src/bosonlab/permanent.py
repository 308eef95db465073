"""Exact matrix permanents.

Three independent evaluation routes:

``per_exact``
    Gray-code inclusion-exclusion over column subsets, O(2^n * n) with
    compensated (Kahan) accumulation. The workhorse for complex matrices
    up to n = 34.
``per_oracle``
    Definitional sum over all n! permutations, each product formed from
    scratch. O(n! * n), capped at n = 9. Shares no algebra with the
    subset route; used to cross-check it.
``per_exact_int``
    The subset route in pure Python integer arithmetic. Exact (no
    rounding) for integer matrices of any magnitude.

Conventions: the permanent of the empty (0 x 0) matrix is 1.
"""

from __future__ import annotations

import numpy as np

from .errors import CapacityError, ContractViolation

try:
    from numba import njit
except ModuleNotFoundError:  # pragma: no cover - numba is a declared dependency
    njit = None

__all__ = ["per_exact", "per_oracle", "per_exact_int", "PER_EXACT_CAP", "PER_ORACLE_CAP"]

PER_EXACT_CAP = 34
PER_ORACLE_CAP = 9


# ----------------------------------------------------------------------
# kernels (numba-compiled when available, plain Python otherwise)
# ----------------------------------------------------------------------

def _ryser_chunk_py(mat, a, b):
    # Sum of (-1)^(n-|S|) * prod_i rowsum_i(S) over subsets S = gray(k),
    # k in [a, b), 1 <= a < b <= 2^n. gray(k) = k ^ (k >> 1); consecutive
    # subsets differ in exactly one column, so row sums update in O(n).
    n = mat.shape[0]
    rowsums = np.zeros(n, dtype=np.complex128)
    g = (a - 1) ^ ((a - 1) >> 1)
    pc = 0
    for j in range(n):
        if (g >> j) & 1:
            pc += 1
            for i in range(n):
                rowsums[i] += mat[i, j]
    total = 0.0 + 0.0j
    comp = 0.0 + 0.0j
    for k in range(a, b):
        v = 0
        kk = k
        while kk & 1 == 0:
            v += 1
            kk >>= 1
        g ^= 1 << v
        if (g >> v) & 1:
            pc += 1
            for i in range(n):
                rowsums[i] += mat[i, v]
        else:
            pc -= 1
            for i in range(n):
                rowsums[i] -= mat[i, v]
        prod = 1.0 + 0.0j
        for i in range(n):
            prod *= rowsums[i]
        if (n - pc) & 1:
            prod = -prod
        y = prod - comp
        t = total + y
        comp = (t - total) - y
        total = t
    return total


def _perm_scan_py(mat):
    # Definitional permanent: visit all permutations in lexicographic order,
    # full product per permutation, compensated accumulation.
    n = mat.shape[0]
    p = np.arange(n)
    total = 0.0 + 0.0j
    comp = 0.0 + 0.0j
    while True:
        prod = 1.0 + 0.0j
        for i in range(n):
            prod *= mat[i, p[i]]
        y = prod - comp
        t = total + y
        comp = (t - total) - y
        total = t
        i = n - 2
        while i >= 0 and p[i] >= p[i + 1]:
            i -= 1
        if i < 0:
            break
        j = n - 1
        while p[j] <= p[i]:
            j -= 1
        p[i], p[j] = p[j], p[i]
        lo = i + 1
        hi = n - 1
        while lo < hi:
            p[lo], p[hi] = p[hi], p[lo]
            lo += 1
            hi -= 1
    return total


if njit is not None:
    _ryser_chunk = njit(cache=True)(_ryser_chunk_py)
    _perm_scan = njit(cache=True)(_perm_scan_py)
else:  # pragma: no cover
    _ryser_chunk = _ryser_chunk_py
    _perm_scan = _perm_scan_py


# ----------------------------------------------------------------------
# public API
# ----------------------------------------------------------------------

def _as_square_complex(mat) -> np.ndarray:
    arr = np.ascontiguousarray(mat, dtype=np.complex128)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise ContractViolation(f"expected a square matrix, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ContractViolation("matrix entries must be finite")
    return arr


def per_exact(mat, partitions: int = 1) -> complex:
    """Permanent of a square complex matrix.

    Parameters
    ----------
    mat : array_like, shape (n, n)
        Square matrix with finite entries, n <= 34.
    partitions : int, optional
        Number of contiguous subset-index chunks the 2^n - 1 terms are
        split into. Chunk results are reduced in index order, so the
        value is deterministic for a fixed partition count regardless
        of how chunks are scheduled.

    Returns
    -------
    complex
        The permanent. Relative accuracy is ~1e-15 * 2^n in the worst
        case; compensated summation keeps typical error far below that.

    Raises
    ------
    ContractViolation
        Non-square or non-finite input, or partitions < 1.
    CapacityError
        n above the 2^n cost cap (34).
    """
    arr = _as_square_complex(mat)
    n = arr.shape[0]
    if n == 0:
        return 1.0 + 0.0j
    if n > PER_EXACT_CAP:
        raise CapacityError(f"permanent of size {n} exceeds the exact-computation cap {PER_EXACT_CAP}")
    if partitions < 1:
        raise ContractViolation("partitions must be >= 1")
    terms = (1 << n) - 1
    chunks = min(int(partitions), terms)
    bounds = [1 + (terms * c) // chunks for c in range(chunks + 1)]
    total = 0.0 + 0.0j
    for c in range(chunks):
        if bounds[c] < bounds[c + 1]:
            total += _ryser_chunk(arr, bounds[c], bounds[c + 1])
    return complex(total)


def per_oracle(mat) -> complex:
    """Permanent by brute-force sum over all n! permutations (n <= 9).

    Maximally independent of :func:`per_exact`: no subset algebra, no
    shared intermediates. Intended as a correctness oracle, not for
    production use.
    """
    arr = _as_square_complex(mat)
    n = arr.shape[0]
    if n == 0:
        return 1.0 + 0.0j
    if n > PER_ORACLE_CAP:
        raise CapacityError(f"oracle permanent capped at n = {PER_ORACLE_CAP}, got {n}")
    return complex(_perm_scan(arr))


def _as_int_rows(mat) -> list[list[int]]:
    if isinstance(mat, np.ndarray):
        if not (np.issubdtype(mat.dtype, np.integer) or mat.dtype == object):
            raise ContractViolation(f"integer matrix required, got dtype {mat.dtype}")
        rows = mat.tolist()
    else:
        rows = [list(r) for r in mat]
    if len(rows) == 0:
        return []
    width = len(rows[0])
    if width != len(rows) or any(len(r) != width for r in rows):
        raise ContractViolation("expected a square matrix")
    out = []
    for r in rows:
        row = []
        for x in r:
            if isinstance(x, bool) or not isinstance(x, (int, np.integer)):
                raise ContractViolation(f"integer matrix required, got entry {x!r}")
            row.append(int(x))
        out.append(row)
    return out


def per_exact_int(mat) -> int:
    """Exact permanent of an integer matrix in arbitrary-precision arithmetic.

    Same subset recurrence as :func:`per_exact` but over Python ints, so
    the result is exact for any entry magnitude. Cost is O(2^n * n);
    sizes beyond ~n = 24 are slow in pure Python.
    """
    rows = _as_int_rows(mat)
    n = len(rows)
    if n == 0:
        return 1
    if n > PER_EXACT_CAP:
        raise CapacityError(f"permanent of size {n} exceeds the exact-computation cap {PER_EXACT_CAP}")
    cols = [[rows[i][j] for i in range(n)] for j in range(n)]
    rowsums = [0] * n
    total = 0
    g = 0
    pc = 0
    for k in range(1, 1 << n):
        v = (k & -k).bit_length() - 1
        g ^= 1 << v
        col = cols[v]
        if (g >> v) & 1:
            pc += 1
            for i in range(n):
                rowsums[i] += col[i]
        else:
            pc -= 1
            for i in range(n):
                rowsums[i] -= col[i]
        prod = 1
        for s in rowsums:
            prod *= s
            if prod == 0:
                break
        total += -prod if (n - pc) & 1 else prod
    return total
