import itertools
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from odbgrowth.combinatorics import (
    Partition, cdf_partition_sum, count_ssyt, count_ssyt_enumerate, partition_sum_table,
    partitions_in_box, rsk_first_row,
)
from odbgrowth.paths import TwoLineArray, ZeroOneMatrix, brute_force_cdf
from conftest import MATRIX_A

partitions = st.lists(st.integers(1, 4), max_size=4).map(lambda v: Partition(tuple(sorted(v, reverse=True))))


def strict_lis(seq):
    best = [1] * len(seq)
    for i in range(len(seq)):
        for j in range(i):
            if seq[j] < seq[i]:
                best[i] = max(best[i], best[j] + 1)
    return max(best, default=0)


@given(partitions)
def test_conjugate_involution(lam):
    assert lam.conjugate().conjugate() == lam
    assert lam.conjugate().size == lam.size


def test_partition_validation():
    with pytest.raises(ValueError):
        Partition((1, 2))


def test_count_examples():
    for M in range(6):
        assert count_ssyt((1,), M) == M
    assert count_ssyt((2, 1), 2) == 2
    assert count_ssyt((1, 1, 1), 2) == 0
    assert count_ssyt((2, 2, 1, 1), 3) == 0


@settings(max_examples=80, deadline=None)
@given(partitions.filter(lambda lam: lam.size <= 6), st.integers(0, 3))
def test_hook_content_matches_enumeration(lam, M):
    assert count_ssyt(lam, M) == count_ssyt_enumerate(lam, M)


def test_box_iteration():
    box = list(partitions_in_box(2, 3))
    assert len(box) == 10  # C(5, 2)
    assert len(set(box)) == len(box)
    assert all(lam.length <= 2 and (not lam.parts or lam.parts[0] <= 3) for lam in box)


def test_partition_sum_examples():
    p = Fraction(2, 7)
    assert cdf_partition_sum(1, 1, p, 0) == 1 - p
    assert cdf_partition_sum(2, 2, Fraction(1, 2), 1) == Fraction(1, 2)
    assert cdf_partition_sum(3, 2, p, 3) == 1 and cdf_partition_sum(3, 2, p, 7) == 1
    assert cdf_partition_sum(3, 2, p, -1) == 0
    with pytest.raises(ValueError):
        cdf_partition_sum(20, 20, p, 10)


@pytest.mark.parametrize("p", [Fraction(1, 4), Fraction(1, 2), Fraction(3, 4)])
def test_partition_sum_equals_brute_force(p):
    for m, n in itertools.product(range(1, 5), repeat=2):
        brute = brute_force_cdf(m, n, p)
        table = partition_sum_table(m, n, p)
        assert table.cdf == brute.cdf
        for h in range(m + 1):
            assert cdf_partition_sum(m, n, p, h, swap_roles=True) == table.cdf[h]


def test_conjugation_symmetry():
    p = Fraction(3, 5)
    for m, n in [(2, 3), (3, 4), (4, 2)]:
        for h in range(m + 1):
            direct = cdf_partition_sum(m, n, p, h)
            assert cdf_partition_sum(m, n, p, h, swap_roles=True) == direct


def test_rsk_examples():
    w = ZeroOneMatrix.from_printed(MATRIX_A).two_line_array()
    assert rsk_first_row(w) == strict_lis(w.bottom)
    assert rsk_first_row(TwoLineArray([(1, 4)])) == 1
    assert rsk_first_row(TwoLineArray([(1, 5), (2, 4), (3, 3), (4, 1)])) == 1


def test_rsk_matches_lis():
    rnd = random.Random(7)
    for _ in range(10_000):
        pairs = sorted({(rnd.randint(1, 6), rnd.randint(1, 6)) for _ in range(rnd.randint(1, 15))})
        w = TwoLineArray(pairs)
        assert rsk_first_row(w) == strict_lis(w.bottom)
