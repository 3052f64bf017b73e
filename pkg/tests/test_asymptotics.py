import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate, optimize, special, stats

from odbgrowth.asymptotics import (
    airy_ai, airy_pair, critical_prob, f2, f2_density, f2_painleve, f2_painleve_density, f2_moments,
    gue_approx, gue_cdf, gue_density, gue_moment, rate_gamma, regime_constants, saddle_inequality,
    time_constants,
)
from odbgrowth.asymptotics.gue import gue2_closed_form, overlaps, overlaps_wronskian
from odbgrowth.asymptotics.tracy_widom import painleve_solution
from odbgrowth.asymptotics.report import critical_csv, f2_csv, gue_table_csv

GRID17 = np.linspace(-5, 3, 17)


# ---- constants ----

@settings(max_examples=100, deadline=None)
@given(alpha=st.floats(0.05, 5), u=st.floats(0.02, 0.98))
def test_constant_invariants(alpha, u):
    r = u / alpha  # alpha r = u < 1
    rc = regime_constants(alpha, r)
    assert 0 < rc.v < 1
    assert rc.b > 0
    assert 3 * rc.b * rc.beta**2 == pytest.approx(1 / rc.v, rel=1e-10)
    assert rc.c1 == pytest.approx(rc.p_c * rc.c, rel=1e-12)
    assert rc.c2 == pytest.approx(rc.p_c ** (1 / 3) * rc.v * (3 * rc.b) ** (1 / 3), rel=1e-12)
    c1, c2 = time_constants(rc.p, rc.p_c)
    assert (rc.c1, rc.c2) == pytest.approx((c1, c2), rel=1e-9)


def test_critical_line():
    for alpha in (0.2, 1.0, 3.0):
        rc = regime_constants(alpha, 1 / alpha)
        assert rc.c == pytest.approx(1.0, abs=1e-12)
        assert not rc.subcritical and rc.v is None
        assert rc.c1 == pytest.approx(rc.p_c, abs=1e-12)


def test_constants_from_double_root():
    alpha, r = 1 / 3, 1.0
    mid = lambda c: c + r - c * r - alpha * r
    disc = lambda c: mid(c) ** 2 - 4 * (c + alpha) * r * (1 - c)
    c = optimize.brentq(disc, 0.5, 0.999, xtol=1e-15)
    double_root = -mid(c) / (2 * (c + alpha))
    rc = regime_constants(alpha, r)
    assert rc.c == pytest.approx(c, abs=1e-10)
    assert rc.v == pytest.approx(-double_root, abs=1e-10)


def test_critical_scale():
    rc = regime_constants(0.5, 2.0, m=200)
    assert rc.S == pytest.approx(math.sqrt(2 / (200 * 0.5 * 1.5)))


@settings(max_examples=100, deadline=None)
@given(alpha=st.floats(0.05, 5), u=st.floats(1.02, 20))
def test_saddle_inequality_above_critical(alpha, u):
    assert saddle_inequality(alpha, u / alpha)


# ---- rate ----

def cramer_rate(eps, p):
    """Legendre transform of the geometric law P(xi = i) = p (1-p)^i at mean (1+eps)(1/p - 1)."""
    target = (1 + eps) * (1 / p - 1)
    lam = lambda th: math.log(p / (1 - (1 - p) * math.exp(th)))
    res = optimize.minimize_scalar(lambda th: lam(th) - th * target, method="bounded",
                                   bounds=(0, -math.log(1 - p) - 1e-12), options={"xatol": 1e-14})
    return -res.fun


def test_rate_examples():
    assert rate_gamma(0.0, 0.4) == 0.0
    assert rate_gamma(0.5, 0.5) == pytest.approx(cramer_rate(0.5, 0.5), rel=1e-9)
    assert rate_gamma(1 / 3, 0.8) == pytest.approx(cramer_rate(1 / 3, 0.8), rel=1e-9)
    d = 1e-5
    assert abs(rate_gamma(d, 0.3) - rate_gamma(-d, 0.3)) / (2 * d) < 1e-6
    assert all(rate_gamma(e, 0.6) > 0 for e in (0.01, 0.5, 3.0))
    with pytest.raises(ValueError):
        rate_gamma(-1.0, 0.5)


# ---- Airy and F2 ----

def test_airy():
    assert airy_ai(0.0) == pytest.approx(3 ** (-2 / 3) / math.gamma(2 / 3), abs=1e-15)
    x = np.linspace(0, 50, 400)
    ai = airy_ai(x)
    assert np.all(ai > 0) and np.all(np.diff(ai) < 0)
    h = 1e-3
    g = np.linspace(-10, 10, 81)
    second = (airy_ai(g + h) - 2 * airy_ai(g) + airy_ai(g - h)) / h**2
    assert np.allclose(second, g * airy_ai(g), atol=1e-6)
    a, ap = airy_pair(1.5)
    assert ap == pytest.approx((airy_ai(1.5 + 1e-6) - airy_ai(1.5 - 1e-6)) / 2e-6, abs=1e-8)
    with pytest.raises(ValueError):
        airy_ai(-25.0)


def test_f2_tails():
    assert 0 <= 1 - f2(8.0) < 1e-10
    assert f2(-10.0) < 1e-6
    with pytest.raises(ValueError):
        f2(-11.0)


def test_f2_routes_agree():
    for s in GRID17:
        assert f2(s) == pytest.approx(f2_painleve(s), abs=1e-8)
        assert f2_density(s) == pytest.approx(f2_painleve_density(s), abs=1e-8)


def test_f2_density_is_derivative():
    h = 1e-3
    for s in (-3.0, -1.5, 0.0, 1.0):
        numeric = (f2(s - 2 * h) - 8 * f2(s - h) + 8 * f2(s + h) - f2(s + 2 * h)) / (12 * h)
        assert f2_density(s) == pytest.approx(numeric, abs=1e-6)


def test_painleve_boundary():
    sol = painleve_solution()
    for s in (7.0, 7.5, 7.9):
        assert sol.q(s) / special.airy(s)[0] == pytest.approx(1.0, abs=1e-6)


def test_f2_moments():
    mo = f2_moments()
    assert mo.mean == pytest.approx(-1.77109, abs=1e-4)
    assert mo.sd == pytest.approx(0.9018, abs=1e-3)
    assert mo.variance == pytest.approx(0.8132, abs=1e-3)
    assert mo.skewness == pytest.approx(0.2241, abs=1e-3)
    assert mo.excess_kurtosis == pytest.approx(0.0935, abs=1e-3)


# ---- critical ----

def test_critical_examples():
    assert critical_prob(0) == 1.0
    assert critical_prob(1) == pytest.approx(0.5, abs=1e-15)
    assert critical_prob(2) == pytest.approx(0.25 - 1 / (2 * math.pi), abs=1e-14)
    assert critical_prob(4) == pytest.approx(1.17616e-4, abs=1e-9)
    vals = [critical_prob(k) for k in range(12)]
    assert all(a > b > 0 for a, b in zip(vals, vals[1:]))
    assert critical_prob(2) == pytest.approx(gue_cdf(2, 0.0), abs=1e-10)
    with pytest.raises(ValueError):
        critical_prob(-1)


def test_critical_closed_forms_beyond_five():
    # the terms cancel down to ~1e-16, so evaluate at high precision
    with mpmath.workdps(40):
        pi = mpmath.pi
        closed = {
            6: mpmath.mpf(1) / 64 - 32 / (135 * pi**3) + 1169 / (3840 * pi**2) - 1249 / (10240 * pi),
            8: (mpmath.mpf(1) / 256 + 4096 / (23625 * pi**4) - 10289 / (36000 * pi**3)
                + 5773487 / (34406400 * pi**2) - 145603 / (3440640 * pi)),
        }
        closed = {k: float(v) for k, v in closed.items()}
    for k, want in closed.items():
        assert critical_prob(k) == pytest.approx(want, rel=1e-10)


# ---- GUE ----

def test_gue_examples():
    s = np.linspace(-4, 4, 33)
    assert np.allclose(gue_cdf(1, s), stats.norm.cdf(s), atol=1e-12)
    assert gue_cdf(2, 0.0) == pytest.approx(0.25 - 1 / (2 * math.pi), abs=1e-12)
    grid = np.linspace(-3, 5, 81)
    assert np.allclose(gue_cdf(2, grid), gue2_closed_form(grid), atol=1e-10)


@pytest.mark.parametrize("n", [1, 3, 6, 12])
def test_gue_cdf_shape(n):
    s = np.linspace(-8, 2 * math.sqrt(n) + 6, 200)
    f = gue_cdf(n, s)
    assert np.all(np.diff(f) >= -1e-13)
    assert f[0] < 1e-8 and 1 - f[-1] < 1e-8


def test_gue_density_is_derivative():
    h = 1e-4
    for n in (2, 4, 7):
        s = np.linspace(-1, 2 * math.sqrt(n) + 1, 9)
        numeric = (gue_cdf(n, s + h) - gue_cdf(n, s - h)) / (2 * h)
        assert np.allclose(gue_density(n, s), numeric, atol=1e-7)


def test_overlaps_closed_form():
    for a in (-2.0, 0.3, 1.7):
        quad = overlaps(6, a).reshape(6, 6)
        closed = overlaps_wronskian(6, a)
        off = ~np.eye(6, dtype=bool)
        assert np.allclose(quad[off], closed[off], atol=1e-13)
        phi = lambda x, k: special.eval_hermite(k, x) * np.exp(-x * x / 2) / math.sqrt(2**k * math.factorial(k) * math.sqrt(math.pi))
        for k in range(6):
            ref = integrate.quad(lambda x: phi(x, k) ** 2, a, np.inf, epsabs=1e-14)[0]
            assert quad[k, k] == pytest.approx(ref, abs=1e-12)


def test_gue_moment_examples():
    assert gue_moment(2, 1) == pytest.approx(2 / math.sqrt(math.pi), abs=1e-5)
    assert gue_moment(3, 2) == pytest.approx(3 + 9 * math.sqrt(3) / (4 * math.pi), abs=1e-5)
    assert gue_moment(1, 4) == pytest.approx(3.0, abs=1e-8)
    assert gue_moment(4, 0) == pytest.approx(1.0, abs=1e-10)


def test_gue_approx():
    assert gue_approx(2)["mean"] == pytest.approx(1.251, abs=1e-3)
    assert gue_approx(2)["variance"] == pytest.approx(0.645, abs=1e-3)
    assert gue_approx(9)["mean"] == pytest.approx(4.772, abs=1e-3)
    assert gue_approx(9)["variance"] == pytest.approx(0.391, abs=1e-3)
    ratios = [gue_approx(n)["mean"] / (2 * math.sqrt(n)) for n in (10, 1000, 10**6)]
    assert ratios[0] < ratios[1] < ratios[2] < 1 and 1 - ratios[2] < 1e-3
    mo = f2_moments()
    assert (mo.mean, mo.variance) == pytest.approx((-1.77109, 0.8132), abs=1e-4)


# ---- reports ----

def test_csv_headers():
    assert f2_csv([0.0]).splitlines()[0] == "s,F2(s),f2(s)"
    assert critical_csv(2).splitlines() == ["dh,prob", "0,1", "1,0.5", f"2,{critical_prob(2):.12g}"]
    assert gue_table_csv([2]).splitlines()[0] == "n,mean,var,skew,kurt,approx_mean,approx_var"
