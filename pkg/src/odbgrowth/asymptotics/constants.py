"""Saddle-point constants of the height distribution.

For ``alpha = n/m`` and ``r = p/(1-p)`` with ``alpha r < 1`` the height
concentrates at ``c m`` with fluctuations of size ``v (3b)^{1/3} m^{1/3}``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, asdict

import numpy as np


@dataclass(frozen=True)
class RegimeConstants:
    alpha: float
    r: float
    c: float
    v: float | None
    b: float | None
    beta: float | None
    c1: float
    c2: float | None
    S: float | None = None
    sigma2: float = 0.0

    @property
    def p(self):
        return self.r / (1 + self.r)

    @property
    def p_c(self):
        return 1 / (1 + self.alpha)

    @property
    def subcritical(self):
        return self.alpha * self.r < 1

    @property
    def scale(self):
        """Fluctuation scale ``v (3b)^{1/3}``, in units of ``m^{1/3}``."""
        if self.v is None:
            return None
        return self.v * (3 * self.b) ** (1 / 3)

    def standardize(self, h, m):
        return (np.asarray(h, dtype=float) - self.c * m) / (self.scale * m ** (1 / 3))

    def to_dict(self):
        d = asdict(self)
        d["p"] = self.p
        d["p_c"] = self.p_c
        return d


def regime_constants(alpha, r, m=None):
    """All constants for ``alpha = n/m``, ``r = p/(1-p)``.

    ``v``, ``b``, ``beta`` and ``c2`` are only defined for ``alpha r < 1``
    and are ``None`` otherwise.  ``S`` needs the size ``m``.
    """
    if alpha <= 0 or r < 0:
        raise ValueError("need alpha > 0 and r >= 0")
    sa, sr = math.sqrt(alpha), math.sqrt(r)
    c = (2 * math.sqrt(alpha * r) + (1 - alpha) * r) / (1 + r)
    p = r / (1 + r)
    p_c = 1 / (1 + alpha)
    v = b = beta = c2 = None
    if alpha * r < 1 and r > 0:
        v = (1 - math.sqrt(alpha * r)) / (1 + math.sqrt(alpha / r))
        b = (sa + sr) ** 5 / (3 * r * sa * (1 + r) ** 3 * (1 - math.sqrt(alpha * r)))
        beta = (alpha * r) ** 0.25 * (1 + r) ** 1.5 / (sa + sr) ** 2
        c2 = p_c ** (1 / 3) * v * (3 * b) ** (1 / 3)
    S = math.sqrt(2 / (m * alpha * (1 + alpha))) if m else None
    return RegimeConstants(alpha, r, c, v, b, beta, p_c * c, c2, S, p * (1 - p))


def time_constants(p, p_c):
    """Closed forms of ``c1`` and ``c2`` in terms of ``p`` and ``p_c``, for ``p < p_c``."""
    c1 = 2 * p_c * p - p + 2 * math.sqrt(p * p_c * (1 - p) * (1 - p_c))
    bracket = (1 + math.sqrt((1 - p) * (1 - p_c) / (p * p_c))) * (
        math.sqrt(p_c / (1 - p_c)) - math.sqrt(p / (1 - p)))
    c2 = (p_c * (1 - p_c)) ** (1 / 6) * (p * (1 - p)) ** 0.5 * bracket ** (2 / 3)
    return c1, c2


def saddle_inequality(alpha, r):
    """``(r+1)^{alpha+1} alpha^alpha / (alpha+1)^{alpha+1} > r``, in logs."""
    lhs = (alpha + 1) * math.log1p(r) + alpha * math.log(alpha) - (alpha + 1) * math.log1p(alpha)
    return lhs > math.log(r)
