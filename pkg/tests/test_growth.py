import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats

from odbgrowth.growth import NEG_INF, HeightTrace, MarkField, evolve, simulate
from conftest import FIG3_MARKS


def check_trace(trace, variant="odb"):
    h = trace.heights
    assert h[0, 0] == 0
    assert np.all(h[1:, 0] == NEG_INF)
    finite = h != NEG_INF
    # once occupied, a site stays occupied and never shrinks
    assert np.all(np.diff(np.where(finite, h, -1), axis=1) >= 0)
    if variant == "odb":
        # the weak rule can pass a neighbour's height on and then bump it, so only odb is Lipschitz
        left, right = h[:-1, :], h[1:, :]
        both = (left != NEG_INF) & (right != NEG_INF)
        assert np.all(left[both] <= right[both] + 1)
        x = np.arange(h.shape[0])[:, None]
        t = np.arange(h.shape[1])[None, :]
        assert np.array_equal(finite, x <= t)
        assert np.all((h[finite] >= 0) & (h[finite] <= (t - x)[finite]))


@settings(max_examples=40, deadline=None)
@given(variant=st.sampled_from(["odb", "weak", "strict"]), x=st.integers(0, 10), t=st.integers(0, 30),
       p=st.floats(0.05, 0.95), seed=st.integers(0, 2**63))
def test_trace_invariants(variant, x, t, p, seed):
    check_trace(simulate(variant, x, t, p, seed), variant)


def test_forced_and_empty_marks():
    full = simulate("odb", 6, 12, marks=np.ones((7, 13), dtype=bool))
    empty = simulate("odb", 6, 12, marks=np.zeros((7, 13), dtype=bool))
    for x in range(7):
        for t in range(x, 13):
            assert full(x, t) == t - x
            assert empty(x, t) == 0


def test_fig3_marks():
    field = MarkField.from_points(FIG3_MARKS, 4, 8)
    assert simulate("odb", 3, 7, marks=field)(3, 7) == 4


def test_determinism_and_seed_dependence():
    a = simulate("weak", 5, 40, 0.3, seed=11)
    b = simulate("weak", 5, 40, 0.3, seed=11)
    c = simulate("weak", 5, 40, 0.3, seed=12)
    assert np.array_equal(a.heights, b.heights)
    assert not np.array_equal(a.heights, c.heights)


def test_mark_frequency():
    field = MarkField.random(50, 4000, 0.3, seed=5)
    marks = field.to_array()
    n = marks.size
    assert abs(marks.mean() - 0.3) < 4 * np.sqrt(0.3 * 0.7 / n)
    assert np.array_equal(marks, MarkField.random(50, 4000, 0.3, seed=5).to_array())
    assert np.array_equal(marks[7], field.column(7, 0, 4000))


def test_inhomogeneous_frequencies():
    probs = np.array([0.1, 0.5, 0.9])
    marks = MarkField.random(3, 20000, probs, seed=3).to_array()
    sigma = np.sqrt(probs * (1 - probs) / 20000)
    assert np.all(np.abs(marks.mean(axis=1) - probs) < 4 * sigma)


def test_site_zero_is_binomial():
    t, p, seeds = 30, 0.4, 3000
    h = np.array([simulate("odb", 0, t, p, seed=s)(0, t) for s in range(seeds)])
    observed = np.bincount(h, minlength=t + 1)
    expected = stats.binom.pmf(np.arange(t + 1), t, p) * seeds
    # pool the sparse tails so every bin expects at least five draws
    keep = expected >= 5
    obs = np.append(observed[keep], observed[~keep].sum())
    exp = np.append(expected[keep], expected[~keep].sum())
    chi2 = ((obs - exp) ** 2 / exp).sum()
    assert chi2 < stats.chi2.ppf(0.999, len(obs) - 1)


@pytest.mark.parametrize("variant", ["odb", "weak", "strict"])
def test_attractive(variant, rng):
    for _ in range(30):
        marks = rng.random((6, 25)) < 0.4
        more = marks | (rng.random(marks.shape) < 0.1)
        lo = evolve(variant, marks)
        hi = evolve(variant, more)
        assert np.all(lo <= hi)


def test_rejects_bad_input():
    with pytest.raises(ValueError):
        simulate("odb", 3, 3, 1.0)
    with pytest.raises(ValueError):
        simulate("odb", 3, 3, 0.0)
    with pytest.raises(ValueError):
        simulate("inhomogeneous", 3, 3, [0.5, 0.5])
    with pytest.raises(ValueError):
        simulate("sideways", 3, 3, 0.5)


def test_csv_round_trip():
    trace = simulate("strict", 4, 9, 0.5, seed=2)
    text = trace.to_csv()
    assert text.splitlines()[0] == "x,t,h"
    assert "-inf" in text
    back = HeightTrace.from_csv(text, "strict")
    assert np.array_equal(back.heights, trace.heights)
