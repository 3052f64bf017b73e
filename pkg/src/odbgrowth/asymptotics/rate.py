"""Large-deviation rate in the deterministic regime ``p > p_c``."""
from __future__ import annotations

import math


def rate_gamma(epsilon, p):
    """``gamma(eps) = (1/p - 1)(1+eps) log(1+eps) - (1+eps-eps p) log(1+eps-eps p) / p``.

    ``-log Prob(h < m) ~ gamma(eps) m`` when ``n = (1+eps)(1/p - 1) m``.
    """
    if epsilon <= -1:
        raise ValueError("epsilon must exceed -1")
    if not 0 < p < 1:
        raise ValueError("p must lie in (0, 1)")
    a = 1 + epsilon
    b = 1 + epsilon - epsilon * p
    return (1 / p - 1) * a * math.log(a) - b * math.log(b) / p


def epsilon_for(m, n, p):
    """``eps`` with ``n = (1+eps)(1/p - 1) m``."""
    return n / ((1 / p - 1) * m) - 1
