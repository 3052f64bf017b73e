"""Last-passage lengths on (0,1)-matrices and mark fields.

Matrices use the bottom-up row convention: ``entries[i - 1, j - 1]`` is row
``i`` counted from the bottom and column ``j`` counted from the left.  Only
:func:`lightcone_matrix` translates space-time points into that frame.
"""
from __future__ import annotations

import bisect
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .tables import DistributionTable, as_fraction

MODES = ("odb", "weak", "strict")
BRUTE_FORCE_CAP = 25


@dataclass
class ZeroOneMatrix:
    entries: np.ndarray

    def __post_init__(self):
        self.entries = np.asarray(self.entries, dtype=bool)
        if self.entries.ndim != 2:
            raise ValueError("a (0,1)-matrix is two dimensional")

    @property
    def m(self):
        return self.entries.shape[0]

    @property
    def n(self):
        return self.entries.shape[1]

    @classmethod
    def from_printed(cls, rows):
        """Build from rows written top to bottom, the way matrices are printed."""
        return cls(np.asarray(rows, dtype=bool)[::-1])

    def printed(self):
        return self.entries[::-1].astype(int)

    def two_line_array(self):
        j, i = np.nonzero(self.entries.T)
        return TwoLineArray([(int(a) + 1, int(b) + 1) for a, b in zip(j, i)])


@dataclass
class TwoLineArray:
    """Column-ordered biword: pairs ``(j, i)``, ``j`` weakly and ``i`` strictly increasing within a column."""

    pairs: list

    def __post_init__(self):
        self.pairs = [tuple(p) for p in self.pairs]
        for a, b in zip(self.pairs, self.pairs[1:]):
            if not (a[0] < b[0] or (a[0] == b[0] and a[1] < b[1])):
                raise ValueError(f"pairs {a} -> {b} break the two-line array ordering")

    @property
    def top(self):
        return [j for j, _ in self.pairs]

    @property
    def bottom(self):
        return [i for _, i in self.pairs]

    def __len__(self):
        return len(self.pairs)

    def to_matrix(self, m, n):
        a = np.zeros((m, n), dtype=bool)
        for j, i in self.pairs:
            a[i - 1, j - 1] = True
        return ZeroOneMatrix(a)


def lightcone_matrix(mark_field, x, t):
    """Backwards lightcone of ``(x, t)`` deformed to a ``(t - x) x (x + 1)`` matrix.

    Column ``j`` holds site ``x' = j - 1`` and row ``i`` the time ``x' + i - 1``.
    """
    if x < 0 or x > t:
        raise ValueError(f"lightcone needs 0 <= x <= t, got x={x}, t={t}")
    m = t - x
    a = np.zeros((m, x + 1), dtype=bool)
    for xp in range(x + 1):
        a[:, xp] = mark_field.column(xp, xp, xp + m)
    return ZeroOneMatrix(a)


def _as_array(matrix):
    return matrix.entries if isinstance(matrix, ZeroOneMatrix) else np.asarray(matrix, dtype=bool)


def longest_increasing(matrix, mode="odb"):
    """Longest chain of 1s under the mode's order.

    odb: rows strictly and columns weakly increasing; weak: both weakly;
    strict: both strictly.
    """
    a = _as_array(matrix).astype(np.int64)
    m, n = a.shape
    if m == 0 or n == 0:
        return 0
    best = np.zeros((m + 1, n + 1), dtype=np.int64)
    for i in range(1, m + 1):
        row = a[i - 1]
        for j in range(1, n + 1):
            if mode == "odb":
                v = max(best[i, j - 1], best[i - 1, j] + row[j - 1])
            elif mode == "weak":
                v = max(best[i - 1, j], best[i, j - 1]) + row[j - 1]
            elif mode == "strict":
                v = max(best[i - 1, j], best[i, j - 1], best[i - 1, j - 1] + row[j - 1])
            else:
                raise ValueError(f"unknown mode {mode!r}")
            best[i, j] = v
    return int(best[m, n])


def _longest_batch(bits, m, n, mode):
    """Vectorized :func:`longest_increasing` over ``bits[..., i, j]``."""
    shape = bits.shape[:-2]
    prev = np.zeros(shape + (n + 1,), dtype=np.int8)
    for i in range(m):
        cur = np.zeros_like(prev)
        for j in range(1, n + 1):
            e = bits[..., i, j - 1]
            if mode == "odb":
                cur[..., j] = np.maximum(cur[..., j - 1], prev[..., j] + e)
            elif mode == "weak":
                cur[..., j] = np.maximum(prev[..., j], cur[..., j - 1]) + e
            else:
                cur[..., j] = np.maximum(np.maximum(prev[..., j], cur[..., j - 1]), prev[..., j - 1] + e)
        prev = cur
    return prev[..., n]


def patience_piles(two_line_array):
    """Patience sorting of the bottom row.

    Each value goes on the leftmost pile whose top is greater than or equal
    to it; returns the piles bottom card first.
    """
    piles = []
    tops = []
    for v in two_line_array.bottom:
        k = bisect.bisect_left(tops, v)
        if k == len(piles):
            piles.append([v])
            tops.append(v)
        else:
            piles[k].append(v)
            tops[k] = v
    return piles


def patience_length(two_line_array):
    return len(patience_piles(two_line_array))


def _column_counts(mark_field, x, k_max):
    """``S[i, k]`` = marks in column ``i`` at times ``0 .. k-1``."""
    s = np.zeros((x + 1, k_max + 1), dtype=np.int64)
    for i in range(x + 1):
        s[i, 1:] = np.cumsum(mark_field.column(i, 0, k_max))
    return s


def _staircase_max(f):
    """max over ``0 <= k_0 <= ... <= k_{x-1} <= K`` of ``f_0(k_0) + sum_i f_i(k_i) - f_i(k_{i-1})`` with ``k_x = K``.

    ``f`` has shape ``(x + 1, K + 1)``; a forward dynamic program in
    ``O(x K)``.  Level 0 enters as ``f_0`` itself, not its running maximum:
    the two agree for counts but not for centered paths.
    """
    g = f[0].copy()
    for i in range(1, f.shape[0]):
        g = np.maximum.accumulate(g - f[i]) + f[i]
    return g[-1]


def l_prime(mark_field, x, t):
    """Column-restricted last passage value: every column read on times ``0 .. t-x-1``."""
    if x < 0 or x > t:
        raise ValueError(f"l_prime needs 0 <= x <= t, got x={x}, t={t}")
    s = _column_counts(mark_field, x, t - x)
    return int(_staircase_max(s))


def l_double_prime(mark_field, x, t, p):
    """Centered piecewise-linear relaxation of :func:`l_prime` over times ``0 .. t``."""
    s = _column_counts(mark_field, x, t).astype(float)
    s -= p * np.arange(t + 1)
    return float(_staircase_max(s))


def brute_force_cdf(m, n, p, mode="odb", fixed_zero=()):
    """Exact ``Prob(L <= h)`` by enumerating all ``2**(m n)`` matrices.

    ``fixed_zero`` lists ``(i, j)`` cells (1-based, bottom-up rows) held at 0;
    they are excluded from the enumeration.
    """
    if mode not in MODES:
        raise ValueError(f"unknown mode {mode!r}")
    p = as_fraction(p)
    free = [(i, j) for i in range(m) for j in range(n) if (i + 1, j + 1) not in set(fixed_zero)]
    cells = len(free)
    if cells > BRUTE_FORCE_CAP:
        raise ValueError(f"brute force limited to {BRUTE_FORCE_CAP} cells, got {cells}")
    counts = np.zeros((cells + 1, m + n + 1), dtype=np.int64)
    chunk = 1 << 18
    total = 1 << cells
    for start in range(0, total, chunk):
        idx = np.arange(start, min(total, start + chunk), dtype=np.int64)
        bits = np.zeros((idx.size, m, n), dtype=np.int8)
        for b, (i, j) in enumerate(free):
            bits[:, i, j] = (idx >> b) & 1
        ones = bits.reshape(idx.size, -1).sum(axis=1)
        lengths = _longest_batch(bits, m, n, mode)
        np.add.at(counts, (ones, lengths), 1)
    q = 1 - p
    pmf = [Fraction(0)] * counts.shape[1]
    for k in range(cells + 1):
        w = p**k * q ** (cells - k)
        for length in np.nonzero(counts[k])[0]:
            pmf[length] += int(counts[k, length]) * w
    cdf = {}
    acc = Fraction(0)
    top = {"odb": m, "weak": m + n - 1, "strict": min(m, n)}[mode]
    for h in range(top + 1):
        acc += pmf[h] if h < len(pmf) else 0
        cdf[h] = acc
    meta = {"fixed_zero": [list(c) for c in fixed_zero]} if fixed_zero else {}
    return DistributionTable(m, n, p, mode, cdf, route="brute", meta=meta)
