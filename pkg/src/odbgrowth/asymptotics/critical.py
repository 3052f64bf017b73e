"""Limit law at the critical probability: ``Prob(h = m - dh)`` determinants."""
from __future__ import annotations

import mpmath as mp

MAX_DELTA_H = 40


def _entry(j, k, dh):
    """Kernel entry ``(j, k)`` without the ``(-S)^{k-j}`` similarity factor."""
    total = mp.mpf(0)
    half = mp.mpf(k - j) / 2
    for ell in range((dh - k - 1) // 2 + 1):
        if (k - j) % 2 == 0 and ell + (k - j) // 2 <= 0:
            # sin * Gamma at a pole: the limit is (-1)^ell pi / ((j-k)/2 - ell)!
            term = (-1) ** ell * mp.pi / mp.factorial((j - k) // 2 - ell)
        else:
            term = mp.sin(mp.pi * half) * mp.gamma(ell + half)
        total += term / mp.factorial(ell)
    return total / (2 * mp.pi)


def critical_matrix(delta_h, dps=50):
    with mp.workdps(dps):
        return mp.matrix([[_entry(j, k, delta_h) for k in range(delta_h)] for j in range(delta_h)])


def critical_prob(delta_h, dps=None):
    """Limit of ``Prob(h <= m - delta_h)`` at ``p = p_c``: ``det(I - K)`` of size ``delta_h``."""
    if delta_h < 0 or int(delta_h) != delta_h:
        raise ValueError("delta_h must be a nonnegative integer")
    delta_h = int(delta_h)
    if delta_h > MAX_DELTA_H:
        raise ValueError(f"delta_h above {MAX_DELTA_H} overflows the Gamma factors at working precision")
    if delta_h == 0:
        return 1.0
    # the determinant shrinks roughly like exp(-dh^2/2): scale precision with it
    dps = dps or 30 + delta_h * delta_h // 2
    with mp.workdps(dps):
        k = critical_matrix(delta_h, dps)
        return float(mp.det(mp.eye(delta_h) - k))
