"""Largest-eigenvalue law of n x n GUE as an n x n determinant.

``F_n(s) = det(delta_ij - int_{s/sqrt2}^inf phi_i phi_j)`` with the
normalized oscillator functions ``phi_k``.  Overlap integrals use composite
Gauss-Legendre panels on ``[a, a + span]``, checked against a doubled rule.
"""
from __future__ import annotations

import math
from functools import lru_cache

import numpy as np
from scipy.special import erf

from ..exact import ConvergenceError
from .tracy_widom import Moments, moments_from_raw

MAX_N = 12
E_TW = -1.77109
VAR_TW = 0.8132
PANEL_WIDTH = 0.5
PANEL_NODES = 12
OVERLAP_TOL = 1e-13


def oscillator(n, x):
    """``phi_0 .. phi_{n-1}`` at ``x``; shape ``(n,) + x.shape``."""
    x = np.asarray(x, dtype=float)
    out = np.empty((n,) + x.shape)
    out[0] = math.pi ** -0.25 * np.exp(-x * x / 2)
    if n > 1:
        out[1] = math.sqrt(2) * x * out[0]
    for k in range(1, n - 1):
        out[k + 1] = math.sqrt(2 / (k + 1)) * x * out[k] - math.sqrt(k / (k + 1)) * out[k - 1]
    return out


@lru_cache(maxsize=None)
def _panel_rule(n):
    return np.polynomial.legendre.leggauss(n)


def _span(n):
    # phi_k is below 1e-30 beyond sqrt(2n+1) + 12
    return math.sqrt(2 * n + 1) + 12.0


@lru_cache(maxsize=None)
def _tail_table(n, nodes):
    """Grid ``g_k`` with spacing PANEL_WIDTH and ``int_{g_k}^inf phi_i phi_j`` at each node."""
    span = _span(n)
    grid = np.arange(-span, span + PANEL_WIDTH, PANEL_WIDTH)
    cells = _panel(n, grid[:-1], grid[1:], nodes)
    tails = np.zeros((len(grid), n, n))
    tails[:-1] = np.cumsum(cells[::-1], axis=0)[::-1]
    return grid, tails


def _panel(n, lo, hi, nodes):
    """``int_lo^hi phi_i phi_j`` on one Gauss-Legendre panel per entry."""
    u, w = _panel_rule(nodes)
    half = (hi - lo) / 2
    x = (lo + half)[:, None] + half[:, None] * u[None, :]
    phi = oscillator(n, x)
    return np.einsum("iaq,jaq,aq->aij", phi, phi, half[:, None] * w[None, :])


def _overlaps_rule(n, a, nodes):
    """``int_a^inf phi_i phi_j``; shape ``a.shape + (n, n)``."""
    a = np.atleast_1d(np.asarray(a, dtype=float))
    grid, tails = _tail_table(n, nodes)
    flat = np.clip(a.ravel(), grid[0], grid[-1])
    k = np.minimum(np.searchsorted(grid, flat), len(grid) - 1)
    out = tails[k] + _panel(n, flat, grid[k], nodes)
    return out.reshape(a.shape + (n, n))


def overlaps(n, a):
    """``int_a^inf phi_i phi_j dx`` by panel quadrature with a doubled-rule check."""
    lo = np.asarray(a, dtype=float)
    coarse = _overlaps_rule(n, np.maximum(lo, -_span(n)), PANEL_NODES)
    fine = _overlaps_rule(n, np.maximum(lo, -_span(n)), 2 * PANEL_NODES)
    if np.abs(coarse - fine).max(initial=0.0) > OVERLAP_TOL:
        raise ConvergenceError("oscillator overlap quadrature did not settle")
    return fine


def overlaps_wronskian(n, a):
    """Off-diagonal overlaps in closed form.

    ``phi_k'' = (x^2 - 2k - 1) phi_k`` gives
    ``int_a^inf phi_i phi_j = -(phi_i' phi_j - phi_i phi_j')(a) / (2 (j - i))``;
    the diagonal is left as NaN.
    """
    a = float(a)
    phi = oscillator(n + 1, a)
    k = np.arange(n)
    dphi = np.sqrt(k / 2) * np.concatenate([[0.0], phi[:n - 1]]) - np.sqrt((k + 1) / 2) * phi[1:n + 1]
    phi = phi[:n]
    out = np.full((n, n), np.nan)
    for i in range(n):
        for j in range(n):
            if i != j:
                out[i, j] = -(dphi[i] * phi[j] - phi[i] * dphi[j]) / (2 * (j - i))
    return out


def _check_n(n):
    if not 1 <= n <= MAX_N:
        raise ValueError(f"n must be between 1 and {MAX_N}")


def gue_cdf(n, s):
    """``F_n(s)``; ``s`` may be an array."""
    _check_n(n)
    s = np.asarray(s, dtype=float)
    m = np.eye(n) - overlaps(n, s.ravel() / math.sqrt(2))
    return np.linalg.det(m).reshape(s.shape)[()]


def _adjugate(m):
    """Batched adjugate via SVD; stays finite where ``m`` is singular."""
    u, sig, vt = np.linalg.svd(m)
    n = sig.shape[-1]
    others = np.stack([np.prod(np.delete(sig, i, axis=-1), axis=-1) for i in range(n)], axis=-1)
    sign = np.linalg.det(u) * np.linalg.det(vt)
    return sign[..., None, None] * np.einsum("...ij,...i,...ki->...jk", vt, others, u)


def gue_density(n, s):
    """``F_n'(s) = phi^T adj(M) phi / sqrt2`` with ``phi`` at ``s / sqrt2`` (Jacobi's formula)."""
    _check_n(n)
    s = np.asarray(s, dtype=float)
    flat = s.ravel() / math.sqrt(2)
    m = np.eye(n) - overlaps(n, flat)
    phi = np.moveaxis(oscillator(n, flat), 0, -1)
    quad = np.einsum("bi,bij,bj->b", phi, _adjugate(m), phi)
    return (quad / math.sqrt(2)).reshape(s.shape)[()]


def _support(n):
    return -15.0, 2 * math.sqrt(n) + 15.0


def _grid(lo, hi, nodes):
    u, w = _panel_rule(nodes)
    edges = np.arange(lo, hi + PANEL_WIDTH / 2, PANEL_WIDTH)
    mid = (edges[:-1] + edges[1:]) / 2
    half = np.diff(edges) / 2
    x = (mid[:, None] + half[:, None] * u[None, :]).ravel()
    return x, (half[:, None] * w[None, :]).ravel()


def _raw_moments(n, nodes):
    x, w = _grid(*_support(n), nodes)
    f = gue_density(n, x) * w
    return np.array([np.sum(f * x ** j) for j in range(5)])


@lru_cache(maxsize=None)
def _settled_moments(n):
    coarse = _raw_moments(n, PANEL_NODES)
    fine = _raw_moments(n, 2 * PANEL_NODES)
    if np.abs(coarse - fine).max() > 1e-10 * max(1.0, np.abs(fine).max()):
        raise ConvergenceError("moment quadrature did not settle")
    return fine


def gue_moment(n, j):
    """``int s^j f_n(s) ds`` for ``0 <= j <= 4``."""
    _check_n(n)
    if not 0 <= j <= 4:
        raise ValueError("moments are tabulated for 0 <= j <= 4")
    return float(_settled_moments(n)[j])


def gue_moments(n) -> Moments:
    _check_n(n)
    return moments_from_raw(_settled_moments(n))


def gue_approx(n):
    """Large-n heuristics: mean ``2 sqrt(n) + E/n^{1/6}``, variance ``Var/n^{1/3}``."""
    if n < 2:
        raise ValueError("the approximation is stated for n >= 2")
    return {"mean": 2 * math.sqrt(n) + E_TW / n ** (1 / 6), "variance": VAR_TW / n ** (1 / 3)}


def gue2_closed_form(s):
    """Elementary closed form of ``F_2``."""
    s = np.asarray(s, dtype=float)
    e = erf(s / math.sqrt(2))
    g = np.exp(-s * s / 2)
    return (0.25 - np.exp(-s * s) / (2 * math.pi) - s * g / (2 ** 1.5 * math.sqrt(math.pi))
            + 0.5 * (1 - s * g / math.sqrt(2 * math.pi)) * e + 0.25 * e * e)
