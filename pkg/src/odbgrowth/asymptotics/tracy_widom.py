"""Tracy-Widom GUE distribution F2 by two independent routes.

Nystrom: ``det(I - K_Airy)`` on ``(s, inf)`` with Gauss-Legendre nodes
mapped through ``x = s + L (1+u)/(1-u)``.  Painleve: integrate
``q'' = s q + 2 q^3`` leftward from Airy data and use
``F2(s) = exp(-int_s^inf (x-s) q(x)^2 dx)``.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import integrate, special

from ..exact import ConvergenceError

F2_DOMAIN = (-10.0, 8.0)
MAP_LENGTH = 10.0
START_NODES = 64
MAX_NODES = 2048
NYSTROM_TOL = 1e-10
PAINLEVE_START = 8.0


@lru_cache(maxsize=None)
def _legendre(n):
    return np.polynomial.legendre.leggauss(n)


def _nodes(s, n):
    u, w = _legendre(n)
    x = s + MAP_LENGTH * (1 + u) / (1 - u)
    w = w * 2 * MAP_LENGTH / (1 - u) ** 2
    return x, w


def _airy(x):
    # far nodes underflow to zero, which is exact to double precision
    ai, aip, _, _ = special.airy(np.minimum(x, 150.0))
    return np.where(x > 150.0, 0.0, ai), np.where(x > 150.0, 0.0, aip)


def airy_kernel(x, y):
    ax, apx = _airy(x)
    ay, apy = _airy(y)
    dx = x[:, None] - y[None, :]
    same = np.abs(dx) < 1e-12
    with np.errstate(divide="ignore", invalid="ignore"):
        k = (ax[:, None] * apy[None, :] - apx[:, None] * ay[None, :]) / dx
    diag = apx ** 2 - x * ax ** 2
    return np.where(same, np.broadcast_to(diag[:, None], k.shape), k)


def _nystrom(s, n):
    x, w = _nodes(s, n)
    sw = np.sqrt(w)
    a = np.eye(n) - sw[:, None] * airy_kernel(x, x) * sw[None, :]
    ai, _ = _airy(x)
    vec = sw * ai
    det = np.linalg.det(a)
    # d/ds log det(I - K_s) = <Ai_s, (I - K_s)^{-1} Ai_s>
    dlog = float(vec @ np.linalg.solve(a, vec))
    return det, det * dlog


def _check_s(s):
    if not F2_DOMAIN[0] <= s <= F2_DOMAIN[1]:
        raise ValueError(f"s={s} outside {F2_DOMAIN}")


def f2_with_density(s):
    """``(F2(s), F2'(s))`` by Nystrom, doubling nodes until stable to 1e-10."""
    _check_s(s)
    n = START_NODES
    prev = _nystrom(s, n)
    while n < MAX_NODES:
        n *= 2
        cur = _nystrom(s, n)
        if abs(cur[0] - prev[0]) <= NYSTROM_TOL and abs(cur[1] - prev[1]) <= NYSTROM_TOL:
            return cur
        prev = cur
    raise ConvergenceError(f"Airy-kernel Nystrom unsettled at {n} nodes for s={s}")


def f2(s):
    return f2_with_density(s)[0]


def f2_density(s):
    return f2_with_density(s)[1]


def _painleve_rhs(s, y):
    q, dq, u, big = y
    return [dq, s * q + 2 * q ** 3, -q * q, -u]


@dataclass(frozen=True)
class PainleveSolution:
    """Dense Hastings-McLeod solution on ``[lower, PAINLEVE_START]``.

    The state is ``(q, q', u, I)`` with ``u(s) = int_s^inf q^2`` and
    ``I(s) = int_s^inf (x-s) q^2``, so ``F2 = exp(-I)`` and ``f2 = u F2``.
    """

    lower: float
    sol: object

    def state(self, s):
        s = np.asarray(s, dtype=float)
        return self.sol(np.clip(s, self.lower, PAINLEVE_START))

    def cdf(self, s):
        return np.exp(-self.state(s)[3])

    def density(self, s):
        st = self.state(s)
        return st[2] * np.exp(-st[3])

    def q(self, s):
        return self.state(s)[0]


def _airy_tail(s0):
    ai, aip, _, _ = special.airy(s0)
    u0 = aip ** 2 - s0 * ai ** 2
    i0 = (2 * s0 ** 2 * ai ** 2 - 2 * s0 * aip ** 2 - ai * aip) / 3
    return [ai, aip, u0, i0]


@lru_cache(maxsize=4)
def painleve_solution(lower=F2_DOMAIN[0], rtol=1e-13, atol=1e-300):
    res = integrate.solve_ivp(
        _painleve_rhs, (PAINLEVE_START, lower), _airy_tail(PAINLEVE_START),
        method="DOP853", rtol=rtol, atol=atol, dense_output=True)
    if res.status != 0:
        raise ConvergenceError(f"Painleve integration failed: {res.message}")
    return PainleveSolution(lower, res.sol)


def f2_painleve(s):
    _check_s(s)
    return float(painleve_solution().cdf(s))


def f2_painleve_density(s):
    _check_s(s)
    return float(painleve_solution().density(s))


@dataclass(frozen=True)
class Moments:
    mean: float
    variance: float
    skewness: float
    excess_kurtosis: float

    @property
    def sd(self):
        return self.variance ** 0.5


def moments_from_density(density, lower, upper, points=()):
    """Mean, variance, skewness and excess kurtosis of a density on ``[lower, upper]``."""
    raw = []
    for j in range(5):
        val, _ = integrate.quad(lambda s: s ** j * density(s), lower, upper,
                                points=points or None, limit=400, epsabs=1e-14, epsrel=1e-13)
        raw.append(val)
    return moments_from_raw(raw)


def moments_from_raw(raw):
    """Central summaries from ``int s^j f`` for ``j = 0..4``, normalized by the mass."""
    mass = raw[0]
    mu = raw[1] / mass
    c2 = raw[2] / mass - mu ** 2
    c3 = raw[3] / mass - 3 * mu * raw[2] / mass + 2 * mu ** 3
    c4 = raw[4] / mass - 4 * mu * raw[3] / mass + 6 * mu ** 2 * raw[2] / mass - 3 * mu ** 4
    return Moments(mu, c2, c3 / c2 ** 1.5, c4 / c2 ** 2 - 3)


@lru_cache(maxsize=1)
def f2_moments():
    sol = painleve_solution()
    return moments_from_density(sol.density, F2_DOMAIN[0], PAINLEVE_START, points=(-4, -2, 0, 2))
