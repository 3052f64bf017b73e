import itertools
from fractions import Fraction

import numpy as np
import pytest

from odbgrowth.growth import evolve


FIG3_MARKS = [(0, 0), (0, 4), (1, 2), (1, 3), (1, 6), (2, 5), (2, 6)]

MATRIX_A = [
    [0, 0, 0, 1, 0, 0, 1],
    [1, 1, 1, 1, 0, 1, 1],
    [1, 1, 0, 0, 0, 1, 0],
    [1, 0, 1, 1, 0, 1, 1],
    [0, 1, 1, 0, 0, 0, 0],
    [0, 0, 0, 0, 1, 0, 1],
]


def all_fields(width, depth):
    """Every boolean field of the given shape, stacked on a leading axis."""
    cells = width * depth
    idx = np.arange(1 << cells)
    bits = (idx[:, None] >> np.arange(cells)) & 1
    return bits.reshape(-1, width, depth).astype(bool)


def exact_height_law(variant, x, t, p):
    """Law of h_t(x) by evolving every mark configuration on sites 0..x, times 0..t-1."""
    fields = all_fields(x + 1, t)
    h = evolve(variant, fields)[:, x, t]
    ones = fields.reshape(len(fields), -1).sum(axis=1)
    cells = (x + 1) * t
    law = {}
    for value, k in zip(h.tolist(), ones.tolist()):
        law[value] = law.get(value, 0) + p**k * (1 - p) ** (cells - k)
    return law


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def pytest_terminal_summary(terminalreporter):
    import sys

    acceptance = sys.modules.get("test_acceptance")
    if acceptance is None or not acceptance.REPORT:
        return
    terminalreporter.section("acceptance criteria")
    for line in sorted(acceptance.REPORT, key=lambda s: int(s[2:s.index("]")])):
        terminalreporter.write_line(line)
