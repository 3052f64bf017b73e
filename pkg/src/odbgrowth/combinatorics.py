"""Exact distribution of the ODB height as a sum over partitions.

``Prob(H <= h) = (1-p)^{mn} sum_{l(lambda) <= h} r^{|lambda|} d_lambda(m) d_lambda'(n)``
with ``r = p / (1 - p)`` and ``d_lambda(M)`` the number of semistandard
tableaux of shape ``lambda`` with entries at most ``M``.
"""
from __future__ import annotations

import bisect
import itertools
from dataclasses import dataclass
from fractions import Fraction

from .tables import DistributionTable, as_fraction

PARTITION_SUM_CAP = 60


@dataclass(frozen=True)
class Partition:
    parts: tuple

    def __post_init__(self):
        parts = tuple(int(v) for v in self.parts if v)
        if any(a < b for a, b in zip(parts, parts[1:])) or any(v < 0 for v in parts):
            raise ValueError(f"{self.parts} is not a partition")
        object.__setattr__(self, "parts", parts)

    @property
    def size(self):
        return sum(self.parts)

    @property
    def length(self):
        return len(self.parts)

    def conjugate(self):
        if not self.parts:
            return Partition(())
        return Partition(tuple(sum(1 for v in self.parts if v > k) for k in range(self.parts[0])))

    def cells(self):
        for i, row in enumerate(self.parts):
            for j in range(row):
                yield i, j


def _as_partition(lam):
    return lam if isinstance(lam, Partition) else Partition(tuple(lam))


def count_ssyt(lam, M):
    """``d_lambda(M)`` by the hook-content formula."""
    lam = _as_partition(lam)
    if lam.length > M:
        return 0
    conj = lam.conjugate().parts
    num = 1
    den = 1
    for i, j in lam.cells():
        num *= M + j - i
        den *= (lam.parts[i] - j) + (conj[j] - i) - 1
    return num // den


def count_ssyt_enumerate(lam, M):
    """Direct enumeration of semistandard fillings; only for small shapes."""
    lam = _as_partition(lam)
    if lam.size > 8:
        raise ValueError("enumeration is limited to shapes with at most 8 boxes")
    cells = list(lam.cells())
    count = 0
    for values in itertools.product(range(1, M + 1), repeat=len(cells)):
        t = dict(zip(cells, values))
        if all(
            (j == 0 or t[i, j - 1] <= v) and (i == 0 or t[i - 1, j] < v)
            for (i, j), v in t.items()
        ):
            count += 1
    return count


def partitions_in_box(rows, cols):
    """Partitions with at most ``rows`` parts, each at most ``cols``."""
    def rec(k, bound):
        yield ()
        if k == 0:
            return
        for first in range(1, bound + 1):
            for rest in rec(k - 1, first):
                yield (first,) + rest
    for lam in rec(rows, cols):
        yield Partition(lam)


def cdf_partition_sum(m, n, p, h, swap_roles=False):
    """Exact ``Prob(H <= h)`` from the partition sum.

    ``swap_roles`` sums the conjugated form instead, over ``lambda_1 <= h``
    with weight ``d_lambda(n) d_lambda'(m)``.
    """
    p = as_fraction(p)
    if h < 0:
        return Fraction(0)
    if h >= m:
        return Fraction(1)
    rows = min(h, m)
    if rows * n > PARTITION_SUM_CAP:
        raise ValueError(f"partition sum over a {rows}x{n} box exceeds the cap of {PARTITION_SUM_CAP} cells")
    r = p / (1 - p)
    total = Fraction(0)
    if swap_roles:
        # lambda_1 <= h, l(lambda) <= n
        for lam in partitions_in_box(n, rows):
            w = count_ssyt(lam, n) * count_ssyt(lam.conjugate(), m)
            if w:
                total += w * r**lam.size
    else:
        for lam in partitions_in_box(rows, n):
            w = count_ssyt(lam, m) * count_ssyt(lam.conjugate(), n)
            if w:
                total += w * r**lam.size
    return (1 - p) ** (m * n) * total


def partition_sum_table(m, n, p):
    p = as_fraction(p)
    cdf = {h: cdf_partition_sum(m, n, p, h) for h in range(m + 1)}
    return DistributionTable(m, n, p, "odb", cdf, route="partition")


def rsk_first_row(two_line_array):
    """Length of the first row of ``P`` under dual row insertion of the bottom row.

    An inserted value bumps the leftmost entry greater than or equal to it,
    so the first row stays strictly increasing.
    """
    row = []
    for v in two_line_array.bottom:
        k = bisect.bisect_left(row, v)
        if k == len(row):
            row.append(v)
        else:
            row[k] = v
    return len(row)
